#include "arhmm/optim.hpp"

#include "arhmm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace arhmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

struct Pair {
    std::vector<double> s;
    std::vector<double> y;
    double rho; // 1 / s'y
};

// Greedy per-coordinate descent pass, used as a rescue when line searches
// along joint directions stall: a steep wall (or a badly scaled coordinate)
// can shrink the accepted step so much that the other coordinates stop
// moving even though one-dimensional moves still improve the objective.
// Tries geometrically spaced steps of both signs per coordinate and keeps
// the first improvement. Returns the total decrease achieved.
double coordinate_rescue(const Objective& f, std::vector<double>& x, double& fx,
                         double scale, long* eval_counter) {
    double total = 0.0;
    std::vector<double> probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double base = scale * std::max(1.0, std::fabs(x[i]));
        double best_step = 0.0;
        double best_f = fx;
        for (int k = 24; k >= 4; k -= 4) {
            const double h = base * static_cast<double>(1u << k);
            for (const double sign : {-1.0, 1.0}) {
                probe[i] = x[i] + sign * h;
                const double ft = f(probe);
                if (eval_counter) ++*eval_counter;
                if (std::isfinite(ft) && ft < best_f) {
                    best_f = ft;
                    best_step = sign * h;
                }
            }
            if (best_step != 0.0) break; // largest improving magnitude wins
        }
        if (best_step != 0.0) {
            x[i] += best_step;
            total += fx - best_f;
            fx = best_f;
        }
        probe[i] = x[i];
    }
    return total;
}

// Two-loop recursion: d = -H g with H built from the stored pairs and the
// standard gamma * I initial matrix.
std::vector<double> lbfgs_direction(const std::deque<Pair>& mem,
                                    const std::vector<double>& g) {
    std::vector<double> q = g;
    std::vector<double> alpha(mem.size());
    for (std::size_t idx = mem.size(); idx-- > 0;) {
        const Pair& p = mem[idx];
        alpha[idx] = p.rho * dot(p.s, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[idx] * p.y[i];
    }
    double gamma = 1.0;
    if (!mem.empty()) {
        const Pair& last = mem.back();
        const double yy = dot(last.y, last.y);
        if (yy > 0.0) gamma = dot(last.s, last.y) / yy;
    }
    for (double& v : q) v *= gamma;
    for (std::size_t idx = 0; idx < mem.size(); ++idx) {
        const Pair& p = mem[idx];
        const double beta = p.rho * dot(p.y, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[idx] - beta) * p.s[i];
    }
    for (double& v : q) v = -v;
    return q;
}

} // namespace

std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x,
                                double scale, long* eval_counter) {
    std::vector<double> g(x.size());
    std::vector<double> probe = x;
    double f_centre = std::numeric_limits<double>::quiet_NaN(); // lazily filled
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = scale * std::max(1.0, std::fabs(x[i]));
        probe[i] = x[i] + h;
        const double fp = f(probe);
        probe[i] = x[i] - h;
        const double fm = f(probe);
        probe[i] = x[i];
        if (eval_counter) *eval_counter += 2;
        if (std::isfinite(fp) && std::isfinite(fm)) {
            g[i] = (fp - fm) / (2.0 * h);
            continue;
        }
        // A probe crossed into an infeasible region. Fall back to the
        // one-sided difference through the centre point, or flatten the
        // component entirely when both sides are lost.
        if (std::isnan(f_centre)) {
            f_centre = f(x);
            if (eval_counter) ++*eval_counter;
        }
        if (std::isfinite(fp)) {
            g[i] = (fp - f_centre) / h;
        } else if (std::isfinite(fm)) {
            g[i] = (f_centre - fm) / h;
        } else {
            g[i] = 0.0;
        }
    }
    return g;
}

MinimizeResult minimize(const Objective& f, std::vector<double> x0,
                        const MinimizeOptions& options) {
    if (x0.empty()) throw ArgumentError("minimize: empty start vector");
    if (options.max_iters < 1 || options.history < 1 || !(options.tol >= 0.0))
        throw ArgumentError("minimize: invalid options");

    MinimizeResult res;
    res.x = std::move(x0);
    res.f = f(res.x);
    res.n_evals = 1;
    if (!std::isfinite(res.f)) {
        res.message = "objective not finite at the start point";
        return res;
    }

    std::vector<double> g = fd_gradient(f, res.x, options.fd_scale, &res.n_evals);
    std::deque<Pair> mem;
    std::vector<double> x_new(res.x.size());

    // Backtracking Armijo search along dir; returns true and leaves the
    // accepted point in x_new / f_new on success.
    double f_new = kInf;
    const auto line_search = [&](const std::vector<double>& dir, double slope,
                                 double alpha) {
        for (int bt = 0; bt < options.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < res.x.size(); ++i)
                x_new[i] = res.x[i] + alpha * dir[i];
            f_new = f(x_new);
            ++res.n_evals;
            if (std::isfinite(f_new) &&
                f_new <= res.f + options.armijo_c1 * alpha * slope)
                return true;
            alpha *= 0.5;
        }
        return false;
    };
    const auto unit_capped_alpha = [](const std::vector<double>& dir) {
        const double dn = norm2(dir);
        return dn > 1.0 ? 1.0 / dn : 1.0;
    };

    for (int iter = 1; iter <= options.max_iters; ++iter) {
        res.iterations = iter;

        std::vector<double> d = lbfgs_direction(mem, g);
        double slope = dot(g, d);
        if (!(slope < 0.0) || !std::isfinite(slope)) {
            // Quasi-Newton direction is unusable; fall back to steepest
            // descent and drop the accumulated memory.
            mem.clear();
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = -g[i];
            slope = -dot(g, g);
            if (!(slope < 0.0)) {
                res.converged = true;
                res.message = "gradient vanished";
                return res;
            }
        }

        // The unit step is the natural quasi-Newton trial once memory
        // exists; without memory, scale to a unit-length move to avoid wild
        // initial jumps.
        bool accepted = line_search(d, slope, mem.empty() ? unit_capped_alpha(d) : 1.0);
        if (!accepted && !mem.empty()) {
            // The quasi-Newton direction stalled; drop the memory and retry
            // along the raw gradient.
            mem.clear();
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = -g[i];
            slope = -dot(g, g);
            if (slope < 0.0 && std::isfinite(slope))
                accepted = line_search(d, slope, unit_capped_alpha(d));
        }
        if (!accepted) {
            // Joint moves are exhausted. A steep wall (or one badly scaled
            // coordinate) can choke the shared step length while individual
            // coordinates still have room, so sweep them before giving up.
            const double gained =
                coordinate_rescue(f, res.x, res.f, options.fd_scale, &res.n_evals);
            if (gained >= options.tol) {
                g = fd_gradient(f, res.x, options.fd_scale, &res.n_evals);
                continue;
            }
            res.converged = true;
            res.message = gained > 0.0 ? "objective change below tolerance"
                                       : "line search found no further decrease";
            return res;
        }

        std::vector<double> g_new = fd_gradient(f, x_new, options.fd_scale, &res.n_evals);

        std::vector<double> s(res.x.size());
        std::vector<double> y(res.x.size());
        for (std::size_t i = 0; i < res.x.size(); ++i) {
            s[i] = x_new[i] - res.x[i];
            y[i] = g_new[i] - g[i];
        }
        const double sy = dot(s, y);
        bool y_finite = true;
        for (double v : y)
            if (!std::isfinite(v)) y_finite = false;
        if (y_finite && sy > 1e-10 * norm2(s) * norm2(y)) {
            mem.push_back(Pair{std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(mem.size()) > options.history) mem.pop_front();
        }

        const double decrease = res.f - f_new;
        res.x = x_new;
        res.f = f_new;
        g = std::move(g_new);

        if (decrease < options.tol) {
            // Ostensibly converged; make sure a cramped line search is not
            // holding per-coordinate progress hostage before declaring it.
            const double gained =
                coordinate_rescue(f, res.x, res.f, options.fd_scale, &res.n_evals);
            if (gained >= options.tol) {
                g = fd_gradient(f, res.x, options.fd_scale, &res.n_evals);
                mem.clear();
                continue;
            }
            res.converged = true;
            res.message = "objective change below tolerance";
            return res;
        }
        if (norm_inf(g) < 1e-12 * std::max(1.0, std::fabs(res.f))) {
            res.converged = true;
            res.message = "gradient vanished";
            return res;
        }
    }
    res.message = "iteration budget exhausted";
    return res;
}

} // namespace arhmm
