#include "arhmm/fit.hpp"

#include "arhmm/core.hpp"
#include "arhmm/errors.hpp"
#include "arhmm/optim.hpp"
#include "arhmm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace arhmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kStartStreamTag = 0x5f17u; // namespaces fit-start draws

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw ArgumentError("quantile of empty data");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

Parameters random_start(const ModelSpec& spec, const std::vector<double>& sorted_steps,
                        const StartRanges& r, std::uint64_t seed, int start_index) {
    RandomStream rng(seed, kStartStreamTag, static_cast<std::uint64_t>(start_index));
    const auto N = static_cast<std::size_t>(spec.n_states);

    Parameters p;
    p.tpm.assign(N, std::vector<double>(N, 0.0));
    for (std::size_t i = 0; i < N; ++i) {
        const double diag = N == 1 ? 1.0 : rng.uniform(r.tpm_diag_lo, r.tpm_diag_hi);
        for (std::size_t j = 0; j < N; ++j)
            p.tpm[i][j] = i == j ? diag : (1.0 - diag) / static_cast<double>(N - 1);
    }

    p.mu_step.resize(N);
    p.cv_step.resize(N);
    p.mu_turn.resize(N);
    p.kappa_turn.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
        const double level =
            N == 1 ? 0.5 : 0.2 + 0.6 * static_cast<double>(j) / static_cast<double>(N - 1);
        const double base = quantile_sorted(sorted_steps, level);
        p.mu_step[j] = base * std::exp(rng.uniform(-r.mu_log_jitter, r.mu_log_jitter));
        p.cv_step[j] = rng.uniform(r.cv_lo, r.cv_hi);
        p.mu_turn[j] = rng.uniform(-r.mu_turn_spread, r.mu_turn_spread);
        p.kappa_turn[j] = rng.uniform(r.kappa_lo, r.kappa_hi);
    }

    auto random_phi_row = [&](int degree) {
        std::vector<double> row(static_cast<std::size_t>(degree));
        if (degree == 0) return row;
        double total = 0.0;
        for (auto& v : row) {
            v = -std::log(rng.u01()); // exponential spacings -> simplex interior
            total += v;
        }
        const double mass = rng.uniform(0.0, r.phi_mass_hi);
        for (auto& v : row) v *= mass / total;
        return row;
    };
    p.phi_step.resize(N);
    p.phi_turn.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
        p.phi_step[j] = random_phi_row(spec.p_step[j]);
        p.phi_turn[j] = random_phi_row(spec.p_turn[j]);
    }
    return p;
}

int count_rounded_nonzero(const Parameters& params) {
    int n = 0;
    auto scan = [&n](const std::vector<std::vector<double>>& rows) {
        for (const auto& row : rows)
            for (double v : row)
                if (std::llround(v * 1000.0) != 0) ++n;
    };
    scan(params.phi_step);
    scan(params.phi_turn);
    return n;
}

struct StartOutcome {
    bool usable = false;
    bool converged = false;
    double f = kInf; // minimized value (negative penalized log-likelihood)
    WorkingVector w;
    std::string note;
};

} // namespace

ModelSpec spec_of(const Parameters& params) {
    ModelSpec spec;
    spec.n_states = static_cast<int>(params.mu_step.size());
    spec.p_step.resize(params.phi_step.size());
    spec.p_turn.resize(params.phi_turn.size());
    for (std::size_t j = 0; j < params.phi_step.size(); ++j)
        spec.p_step[j] = static_cast<int>(params.phi_step[j].size());
    for (std::size_t j = 0; j < params.phi_turn.size(); ++j)
        spec.p_turn[j] = static_cast<int>(params.phi_turn[j].size());
    return spec;
}

double t_effective(const PooledData& data, const ModelSpec& spec) {
    const double off_step = static_cast<double>(spec.max_p_step());
    const double off_turn = static_cast<double>(spec.max_p_turn());
    double total = 0.0;
    for (const auto& s : data.series()) {
        const auto T = static_cast<double>(s.length());
        total += (T - off_step) + (T - off_turn);
    }
    return total / 2.0;
}

int effective_df(const Parameters& params, const ModelSpec& spec) {
    const int n = spec.n_states;
    return n * (n - 1) + 4 * n + count_rounded_nonzero(params);
}

Degrees selected_degrees(const Parameters& params) {
    Degrees d;
    auto degree_of = [](const std::vector<double>& row) {
        int deg = 0;
        for (std::size_t k = 0; k < row.size(); ++k)
            if (std::llround(row[k] * 1000.0) != 0) deg = static_cast<int>(k) + 1;
        return deg;
    };
    d.step.reserve(params.phi_step.size());
    d.turn.reserve(params.phi_turn.size());
    for (const auto& row : params.phi_step) d.step.push_back(degree_of(row));
    for (const auto& row : params.phi_turn) d.turn.push_back(degree_of(row));
    return d;
}

FitResult fit(const PooledData& data, const ModelSpec& spec, const PenaltyConfig& pen,
              const FitOptions& opts) {
    spec.validate();
    if (opts.n_starts < 1) throw ArgumentError("fit: n_starts must be >= 1");
    if (opts.max_iters < 1) throw ArgumentError("fit: max_iters must be >= 1");
    if (!(pen.lambda >= 0.0)) throw ArgumentError("fit: lambda must be >= 0");
    if (!(pen.epsilon > 0.0)) throw ArgumentError("fit: epsilon must be > 0");

    const auto max_degree =
        static_cast<std::size_t>(std::max(spec.max_p_step(), spec.max_p_turn()));
    for (const auto& s : data.series()) {
        if (s.length() <= max_degree)
            throw ArgumentError("fit: track '" + s.track_id + "' has length " +
                                std::to_string(s.length()) +
                                ", not exceeding the max AR degree " +
                                std::to_string(max_degree));
    }

    std::vector<double> sorted_steps;
    sorted_steps.reserve(data.total_length());
    for (const auto& s : data.series())
        sorted_steps.insert(sorted_steps.end(), s.steps.begin(), s.steps.end());
    std::sort(sorted_steps.begin(), sorted_steps.end());

    const Objective objective = [&](const std::vector<double>& w) {
        // Trial points can wander into degenerate corners of the working
        // space (a numerically reducible transition matrix, an overflowed
        // mean). Report those as infinitely bad so the line search backs off
        // instead of the whole start aborting.
        try {
            Parameters p = from_working(w, spec);
            return -penalized_cond_loglik(data, p, spec, pen);
        } catch (const NumericError&) {
            return kInf;
        } catch (const DomainError&) {
            return kInf;
        }
    };

    const int n_total = opts.n_starts + (opts.init ? 1 : 0);
    std::vector<StartOutcome> outcomes(static_cast<std::size_t>(n_total));

    parallel_for(
        static_cast<std::size_t>(n_total),
        [&](std::size_t idx) {
            StartOutcome& out = outcomes[idx];
            WorkingVector w0;
            try {
                if (static_cast<int>(idx) < opts.n_starts) {
                    const Parameters start = random_start(
                        spec, sorted_steps, opts.start_ranges, opts.seed,
                        static_cast<int>(idx));
                    w0 = to_working(start, spec);
                } else {
                    w0 = to_working(*opts.init, spec);
                }
            } catch (const std::exception& e) {
                out.note = std::string("start rejected: ") + e.what();
                return;
            }
            MinimizeOptions mopts;
            mopts.max_iters = opts.max_iters;
            mopts.tol = opts.tol;
            MinimizeResult mr;
            try {
                mr = minimize(objective, std::move(w0), mopts);
            } catch (const std::exception& e) {
                out.note = std::string("optimization failed: ") + e.what();
                return;
            }
            if (!std::isfinite(mr.f)) {
                out.note = mr.message.empty() ? "non-finite objective" : mr.message;
                return;
            }
            out.usable = true;
            out.converged = mr.converged;
            out.f = mr.f;
            out.w = std::move(mr.x);
            out.note = mr.message;
        },
        opts.threads);

    int best = -1;
    for (int i = 0; i < n_total; ++i) {
        if (!outcomes[static_cast<std::size_t>(i)].usable) continue;
        if (best < 0 || outcomes[static_cast<std::size_t>(i)].f <
                            outcomes[static_cast<std::size_t>(best)].f)
            best = i;
    }
    if (best < 0) {
        std::ostringstream oss;
        oss << "fit: every start failed;";
        for (int i = 0; i < n_total; ++i)
            oss << " [start " << i << ": " << outcomes[static_cast<std::size_t>(i)].note
                << "]";
        throw NumericError(oss.str());
    }
    const StartOutcome& winner = outcomes[static_cast<std::size_t>(best)];

    int agreeing = 0;
    for (const auto& o : outcomes)
        if (o.usable && o.f <= winner.f + 1e-3) ++agreeing;

    FitResult res;
    res.params = sort_states_by_step_mean(from_working(winner.w, spec));
    // Relabeling the states permutes the per-state AR degrees with them.
    res.spec = spec;
    for (std::size_t j = 0; j < res.params.phi_step.size(); ++j) {
        res.spec.p_step[j] = static_cast<int>(res.params.phi_step[j].size());
        res.spec.p_turn[j] = static_cast<int>(res.params.phi_turn[j].size());
    }
    res.lambda = pen.lambda;
    res.converged = winner.converged;
    res.n_starts_agreeing = agreeing;
    res.penalized_objective = -winner.f;
    res.loglik = cond_loglik(data, res.params, res.spec);
    res.edf = effective_df(res.params, res.spec);
    const double k = static_cast<double>(res.edf);
    res.aic = -2.0 * res.loglik + 2.0 * k;
    res.bic = -2.0 * res.loglik + k * std::log(t_effective(data, res.spec));
    return res;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    grid.reserve(24);
    grid.push_back(0.0);
    const double lo = std::log(0.1);
    const double hi = std::log(100.0);
    for (int i = 0; i < 23; ++i)
        grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / 22.0));
    return grid;
}

LambdaPath lambda_path(const PooledData& data, const ModelSpec& spec,
                       const std::vector<double>& grid, const FitOptions& opts,
                       double epsilon) {
    if (grid.empty()) throw ArgumentError("lambda_path: empty grid");
    if (grid.front() != 0.0) throw ArgumentError("lambda_path: grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ArgumentError("lambda_path: grid must be strictly increasing");

    LambdaPath path;
    path.grid = grid;
    path.fits.resize(grid.size());
    path.errors.assign(grid.size(), "");
    path.warm_started = true;

    // A warm start is only usable if its per-state AR layout matches the
    // requested spec; state relabeling inside fit() can permute the rows of a
    // ragged spec, in which case we fall back to fresh starts.
    const auto layout_matches = [&spec](const Parameters& p) {
        for (std::size_t j = 0; j < p.phi_step.size(); ++j) {
            if (p.phi_step[j].size() != static_cast<std::size_t>(spec.p_step[j]) ||
                p.phi_turn[j].size() != static_cast<std::size_t>(spec.p_turn[j]))
                return false;
        }
        return true;
    };

    std::optional<Parameters> warm;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        FitOptions point_opts = opts;
        if (gi > 0) {
            point_opts.n_starts = std::max(1, opts.path_fresh_starts);
            point_opts.init = (warm && layout_matches(*warm)) ? warm : opts.init;
            // Decorrelate the fresh starts of successive grid points.
            point_opts.seed = opts.seed + 0x9E37 * (gi + 1);
        }
        try {
            path.fits[gi] =
                fit(data, spec, PenaltyConfig{grid[gi], epsilon}, point_opts);
            warm = path.fits[gi]->params;
        } catch (const std::exception& e) {
            path.errors[gi] = e.what();
        }
    }
    return path;
}

FitResult select_lambda(const LambdaPath& path, Criterion criterion,
                        const PooledData* data,
                        const std::vector<StateSequence>* truth) {
    if (path.grid.empty() || path.fits.empty())
        throw ArgumentError("select_lambda: empty path");
    if (criterion == Criterion::accuracy && (data == nullptr || truth == nullptr))
        throw ArgumentError("select_lambda: accuracy criterion requires data and truth");

    int best = -1;
    double best_score = 0.0;
    for (std::size_t i = 0; i < path.fits.size(); ++i) {
        if (!path.fits[i]) continue;
        const FitResult& fr = *path.fits[i];
        double score = 0.0;
        switch (criterion) {
            case Criterion::aic: score = -fr.aic; break; // maximize -IC
            case Criterion::bic: score = -fr.bic; break;
            case Criterion::accuracy: {
                std::vector<StateSequence> decoded;
                decoded.reserve(data->n_series());
                for (const auto& s : data->series())
                    decoded.push_back(viterbi(s, fr.params, fr.spec));
                score = pooled_decoding_accuracy(decoded, *truth);
                break;
            }
        }
        // >= ties break toward the larger lambda (grid is ascending).
        if (best < 0 || score >= best_score) {
            best = static_cast<int>(i);
            best_score = score;
        }
    }
    if (best < 0)
        throw ArgumentError("select_lambda: no usable fits in the path");
    return *path.fits[static_cast<std::size_t>(best)];
}

} // namespace arhmm
