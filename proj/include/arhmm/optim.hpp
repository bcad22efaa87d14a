#pragma once

#include <functional>
#include <string>
#include <vector>

namespace arhmm {

using Objective = std::function<double(const std::vector<double>&)>;

struct MinimizeOptions {
    int max_iters = 2000;
    double tol = 1e-8;   // stop when the objective decrease falls below this
    int history = 10;    // stored curvature pairs
    double armijo_c1 = 1e-4;
    int max_backtracks = 50;
    double fd_scale = 1e-6; // h_i = fd_scale * max(1, |x_i|) for gradients
};

struct MinimizeResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    long n_evals = 0;
    bool converged = false;
    std::string message;
};

// Central finite-difference gradient with per-coordinate step
// h_i = scale * max(1, |x_i|).
std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x,
                                double scale, long* eval_counter = nullptr);

// Limited-memory BFGS with Armijo backtracking line search. Gradients come
// from central finite differences, so each iteration costs 2*dim + O(1)
// objective evaluations. Non-finite trial points are rejected by the line
// search; curvature pairs with non-positive s'y are skipped. When progress
// stalls (line-search failure or a sub-tol decrease) the optimizer escalates
// through steepest descent and a per-coordinate sweep before it reports
// convergence, which protects badly scaled coordinates from being starved by
// a cramped shared step length. Terminates when even the sweep cannot beat
// tol, the iteration budget runs out, or the gradient vanishes.
MinimizeResult minimize(const Objective& f, std::vector<double> x0,
                        const MinimizeOptions& options = {});

} // namespace arhmm
