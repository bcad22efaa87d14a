#include "arhmm/likelihood.hpp"

#include "arhmm/core.hpp"
#include "arhmm/dists.hpp"
#include "arhmm/errors.hpp"
#include "arhmm/kernels/kernels.hpp"
#include "arhmm/special.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace arhmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Grow-only per-thread scratch so repeated objective evaluations do not
// allocate.
struct Workspace {
    std::vector<double> log_dens;
    std::vector<double> column;
};

Workspace& workspace() {
    thread_local Workspace ws;
    return ws;
}

[[noreturn]] void throw_bad_factor(const std::string& track_id, std::size_t t, int state) {
    throw NumericError("non-finite log-density factor (track '" + track_id +
                       "', t = " + std::to_string(t) + ", state = " +
                       std::to_string(state + 1) + ")");
}

// Closed-form density evaluation stops being trustworthy once its leading
// terms dwarf the result: as gamma shape 1/cv^2 or von Mises concentration
// grow, the rounding noise of the individual terms (which scale with the
// parameter) eventually exceeds the log-density itself, and an optimizer left
// free to wander there can mistake that noise for likelihood. The bounds
// below sit far under that cliff while remaining many orders of magnitude
// beyond any statistically meaningful fit, so refuse loudly instead of
// returning junk.
constexpr double kMaxStepShape = 1e10;
constexpr double kMaxTurnKappa = 1e10;

void check_density_scale(double cv, double kappa, int state) {
    if (!(1.0 / (cv * cv) <= kMaxStepShape))
        throw NumericError("step density for state " + std::to_string(state + 1) +
                           " is out of numeric range (cv too close to zero)");
    if (!(kappa <= kMaxTurnKappa))
        throw NumericError("turn density for state " + std::to_string(state + 1) +
                           " is out of numeric range (kappa too large)");
}

} // namespace

PreparedSeries prepare_series(const StepTurnSeries& series) {
    PreparedSeries prep;
    const std::size_t n = series.length();
    prep.log_steps.resize(n);
    prep.cos_turns.resize(n);
    prep.sin_turns.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        prep.log_steps[t] = std::log(series.steps[t]);
        prep.cos_turns[t] = std::cos(series.turns[t]);
        prep.sin_turns[t] = std::sin(series.turns[t]);
    }
    return prep;
}

void validate_series(const StepTurnSeries& s) {
    if (s.length() == 0)
        throw DataError("series '" + s.track_id + "' is empty");
    if (s.steps.size() != s.turns.size())
        throw DataError("series '" + s.track_id + "' has misaligned step/turn lengths");
    for (std::size_t t = 0; t < s.length(); ++t) {
        const double step = s.steps[t];
        if (!(step > 0.0) || !std::isfinite(step))
            throw DomainError("series '" + s.track_id + "' step at t = " +
                              std::to_string(t) + " is not a positive finite number");
        const double turn = s.turns[t];
        if (!std::isfinite(turn) || turn <= -pi || turn > pi)
            throw DomainError("series '" + s.track_id + "' turn at t = " +
                              std::to_string(t) + " lies outside (-pi, pi]");
    }
}

PooledData::PooledData(std::vector<StepTurnSeries> series) : series_(std::move(series)) {
    if (series_.empty()) throw ArgumentError("PooledData: at least one series is required");
    prepared_.reserve(series_.size());
    for (const auto& s : series_) {
        validate_series(s);
        prepared_.push_back(prepare_series(s));
        total_length_ += s.length();
    }
}

double smooth_l1(double x, double epsilon) {
    return std::sqrt(x * x + epsilon * epsilon);
}

double state_log_density(const StepTurnSeries& series, const Parameters& params,
                         const ModelSpec& spec, std::size_t t, int state) {
    spec.validate();
    params.validate(spec);
    if (state < 0 || state >= spec.n_states)
        throw ArgumentError("state_log_density: state index out of range");
    if (t >= series.length()) throw ArgumentError("state_log_density: t out of range");
    check_density_scale(params.cv_step[static_cast<std::size_t>(state)],
                        params.kappa_turn[static_cast<std::size_t>(state)], state);

    double lp = 0.0;
    const auto& phi_s = params.phi_step[static_cast<std::size_t>(state)];
    const std::size_t p = phi_s.size();
    if (t >= p) {
        std::vector<double> hist(p);
        for (std::size_t k = 0; k < p; ++k) hist[k] = series.steps[t - 1 - k];
        const double mean =
            ar_step_mean(hist, phi_s, params.mu_step[static_cast<std::size_t>(state)]);
        const double cv = params.cv_step[static_cast<std::size_t>(state)];
        lp += gamma_logpdf(series.steps[t], GammaMeanSd{mean, cv * mean});
    }
    const auto& phi_t = params.phi_turn[static_cast<std::size_t>(state)];
    const std::size_t q = phi_t.size();
    if (t >= q) {
        std::vector<double> hist(q);
        for (std::size_t k = 0; k < q; ++k) hist[k] = series.turns[t - 1 - k];
        const double mean =
            ar_turn_mean(hist, phi_t, params.mu_turn[static_cast<std::size_t>(state)]);
        lp += vonmises_logpdf(series.turns[t],
                              VonMises{mean, params.kappa_turn[static_cast<std::size_t>(state)]});
    }
    return lp;
}

void log_density_matrix(const StepTurnSeries& series, const PreparedSeries& prep,
                        const Parameters& params, const ModelSpec& spec, double* out) {
    const std::size_t T = series.length();
    const auto& backend = kernels::active();
    auto& ws = workspace();
    ws.column.resize(T);

    for (int j = 0; j < spec.n_states; ++j) {
        const auto js = static_cast<std::size_t>(j);
        double* row = out + js * T;
        check_density_scale(params.cv_step[js], params.kappa_turn[js], j);

        // Step factor. States whose AR window is not yet filled contribute a
        // factor of one (log zero).
        const auto& phi_s = params.phi_step[js];
        const std::size_t p = phi_s.size();
        double phi_sum = 0.0;
        for (double v : phi_s) phi_sum += v;
        const double shape = 1.0 / (params.cv_step[js] * params.cv_step[js]);
        const double c0 = shape * std::log(shape) - std::lgamma(shape);
        const double anchor = (1.0 - phi_sum) * params.mu_step[js];
        for (std::size_t t = 0; t < std::min(p, T); ++t) row[t] = 0.0;
        if (T > p) {
            backend.gamma_ar_loglik(series.steps.data(), prep.log_steps.data(), T, p,
                                    phi_s.data(), anchor, shape, c0, row + p);
        }

        // Turn factor, accumulated on top with its own conditioning prefix.
        const auto& phi_t = params.phi_turn[js];
        const std::size_t q = phi_t.size();
        double psi_sum = 0.0;
        for (double v : phi_t) psi_sum += v;
        const double mu = params.mu_turn[js];
        const double kappa = params.kappa_turn[js];
        const double log_norm = std::log(two_pi) + log_bessel_i0(kappa);
        if (T > q) {
            backend.vonmises_ar_loglik(prep.cos_turns.data(), prep.sin_turns.data(), T, q,
                                       phi_t.data(), (1.0 - psi_sum) * std::cos(mu),
                                       (1.0 - psi_sum) * std::sin(mu), kappa, log_norm,
                                       std::cos(mu), std::sin(mu), ws.column.data());
            const double* vm = ws.column.data();
            for (std::size_t t = q; t < T; ++t) row[t] += vm[t - q];
        }
    }
}

double forward_pass(const double* log_dens, std::size_t T, int n_states,
                    const std::vector<double>& delta,
                    const std::vector<std::vector<double>>& tpm,
                    const std::string& track_id, std::vector<double>* predictive) {
    const auto N = static_cast<std::size_t>(n_states);
    if (N == 0 || delta.size() != N || tpm.size() != N)
        throw ArgumentError("forward_pass: inconsistent state dimensions");
    if (predictive) predictive->assign(T * N, 0.0);

    std::vector<double> filtered(N);
    std::vector<double> pred(N);
    double log_acc = 0.0;
    double scale_prod = 1.0;

    for (std::size_t t = 0; t < T; ++t) {
        if (t == 0) {
            pred = delta;
        } else {
            for (std::size_t j = 0; j < N; ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < N; ++i) s += filtered[i] * tpm[i][j];
                pred[j] = s;
            }
        }
        if (predictive) {
            for (std::size_t j = 0; j < N; ++j) (*predictive)[t * N + j] = pred[j];
        }

        double m = -kInf;
        for (std::size_t j = 0; j < N; ++j) {
            const double v = log_dens[j * T + t];
            if (std::isnan(v) || v == kInf)
                throw_bad_factor(track_id, t, static_cast<int>(j));
            if (v > m) m = v;
        }
        if (m == -kInf)
            throw NumericError("every state density vanished (track '" + track_id +
                               "', t = " + std::to_string(t) + ")");

        double c = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            filtered[j] = pred[j] * std::exp(log_dens[j * T + t] - m);
            c += filtered[j];
        }
        if (!(c > 0.0) || !std::isfinite(c))
            throw NumericError("forward scale degenerated (track '" + track_id +
                               "', t = " + std::to_string(t) + ")");
        const double inv = 1.0 / c;
        for (std::size_t j = 0; j < N; ++j) filtered[j] *= inv;

        log_acc += m;
        scale_prod *= c;
        if (scale_prod < 1e-250 || scale_prod > 1e250) {
            log_acc += std::log(scale_prod);
            scale_prod = 1.0;
        }
    }
    return log_acc + std::log(scale_prod);
}

double cond_loglik(const PooledData& data, const Parameters& params,
                   const ModelSpec& spec) {
    return penalized_cond_loglik(data, params, spec, PenaltyConfig{0.0, 1e-6});
}

double penalized_cond_loglik(const PooledData& data, const Parameters& params,
                             const ModelSpec& spec, const PenaltyConfig& penalty) {
    spec.validate();
    params.validate(spec);
    const std::vector<double> delta = stationary_dist(params.tpm);
    const auto N = static_cast<std::size_t>(spec.n_states);

    auto& ws = workspace();
    double ll = 0.0;
    for (std::size_t s = 0; s < data.n_series(); ++s) {
        const auto& series = data.series()[s];
        const std::size_t T = series.length();
        ws.log_dens.resize(N * T);
        log_density_matrix(series, data.prepared()[s], params, spec, ws.log_dens.data());
        ll += forward_pass(ws.log_dens.data(), T, spec.n_states, delta, params.tpm,
                           series.track_id, nullptr);
    }

    if (penalty.lambda != 0.0) {
        double pen = 0.0;
        for (const auto& row : params.phi_step)
            for (double v : row) pen += smooth_l1(v, penalty.epsilon);
        for (const auto& row : params.phi_turn)
            for (double v : row) pen += smooth_l1(v, penalty.epsilon);
        ll -= penalty.lambda * pen;
    }
    return ll;
}

} // namespace arhmm
