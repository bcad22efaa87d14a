#pragma once

#include "arhmm/decode.hpp"
#include "arhmm/likelihood.hpp"
#include "arhmm/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace arhmm {

// Sampling intervals for the random multi-start initial values.
struct StartRanges {
    double mu_log_jitter = 0.3; // log-scale uniform jitter around data quantiles
    double cv_lo = 0.1, cv_hi = 0.8;
    double kappa_lo = 0.5, kappa_hi = 15.0;
    double mu_turn_spread = 0.3;
    double tpm_diag_lo = 0.7, tpm_diag_hi = 0.95;
    double phi_mass_hi = 0.7; // total AR mass per row drawn from [0, this]
};

struct FitOptions {
    int n_starts = 10;
    int max_iters = 2000;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    StartRanges start_ranges{};
    // Extra user-supplied start, optimized alongside the random ones.
    std::optional<Parameters> init;
    // Fresh random starts per positive-lambda grid point in lambda_path (the
    // warm start from the previous grid point is always added on top).
    int path_fresh_starts = 2;
    unsigned threads = 1;
};

struct FitResult {
    Parameters params; // states sorted by ascending mu_step
    ModelSpec spec;
    double loglik = 0.0;              // unpenalized conditional log-likelihood
    double penalized_objective = 0.0; // value of the maximized objective
    double lambda = 0.0;
    bool converged = false;
    int n_starts_agreeing = 0; // starts within 1e-3 of the best objective
    double aic = 0.0;
    double bic = 0.0;
    int edf = 0;
};

struct LambdaPath {
    std::vector<double> grid;
    std::vector<std::optional<FitResult>> fits; // empty where a grid point failed
    std::vector<std::string> errors;            // diagnostic per failed grid point
    bool warm_started = true;
};

struct Degrees {
    std::vector<int> step;
    std::vector<int> turn;
};

enum class Criterion { aic, bic, accuracy };

// Penalized maximum likelihood over the working parameter space from
// n_starts random initializations (plus opts.init when given). Deterministic
// in (data, spec, pen, opts). Starts with a non-finite objective are
// discarded; if every start fails a NumericError carries the per-start
// diagnostics. AIC/BIC use the unpenalized log-likelihood with k = edf and
// the conditioning-adjusted sample size t_effective.
FitResult fit(const PooledData& data, const ModelSpec& spec, const PenaltyConfig& pen,
              const FitOptions& opts);

// 0 followed by 23 log-spaced values spanning [0.1, 100].
std::vector<double> default_lambda_grid();

// Sequential fits along the grid (first entry must be 0, strictly
// increasing), warm-starting each grid point from the previous optimum plus
// opts.path_fresh_starts fresh random starts. Failures are recorded per grid
// point, not fatal.
LambdaPath lambda_path(const PooledData& data, const ModelSpec& spec,
                       const std::vector<double>& grid, const FitOptions& opts,
                       double epsilon = 1e-6);

// AR degree read off a fitted parameter set: round every phi to 3 decimals,
// take the largest lag whose coefficient stays non-zero (0 when all vanish).
Degrees selected_degrees(const Parameters& params);

// N(N-1) + 4N unpenalized parameters plus the count of AR coefficients that
// survive 3-decimal rounding.
int effective_df(const Parameters& params, const ModelSpec& spec);

// Conditioning-adjusted sample size: per track and per variable the number of
// non-unity density factors (T minus the max AR degree across states),
// averaged over the two variables.
double t_effective(const PooledData& data, const ModelSpec& spec);

// Picks the grid fit minimizing AIC/BIC or maximizing decoding accuracy
// against truth (which requires the data the path was fitted on). Ties break
// toward larger lambda.
FitResult select_lambda(const LambdaPath& path, Criterion criterion,
                        const PooledData* data = nullptr,
                        const std::vector<StateSequence>* truth = nullptr);

// Model structure implied by a parameter set (state count and per-state AR
// window lengths as stored, before any rounding).
ModelSpec spec_of(const Parameters& params);

} // namespace arhmm
