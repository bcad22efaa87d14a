#pragma once

#include "arhmm/geometry.hpp"
#include "arhmm/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace arhmm {

// Per-series arrays precomputed once and reused by every likelihood
// evaluation: log step lengths and the cos/sin of each turning angle.
struct PreparedSeries {
    std::vector<double> log_steps;
    std::vector<double> cos_turns;
    std::vector<double> sin_turns;
};

PreparedSeries prepare_series(const StepTurnSeries& series);

// Checks one series for use with the model: non-empty, step/turn arrays the
// same length, every step positive and finite, every turn in (-pi, pi].
// Throws DataError for structural problems and DomainError for bad values.
void validate_series(const StepTurnSeries& series);

// One or more step/turn series pooled for joint fitting. Construction
// validates every observation (steps positive and finite, turns in (-pi, pi])
// and precomputes the PreparedSeries arrays.
class PooledData {
public:
    explicit PooledData(std::vector<StepTurnSeries> series);

    const std::vector<StepTurnSeries>& series() const { return series_; }
    const std::vector<PreparedSeries>& prepared() const { return prepared_; }
    std::size_t n_series() const { return series_.size(); }
    std::size_t total_length() const { return total_length_; }

private:
    std::vector<StepTurnSeries> series_;
    std::vector<PreparedSeries> prepared_;
    std::size_t total_length_ = 0;
};

struct PenaltyConfig {
    double lambda = 0.0;
    double epsilon = 1e-6; // smoothing half-width of the differentiable |x|
};

// Differentiable absolute value: sqrt(x^2 + epsilon^2). Strictly positive
// everywhere, within epsilon of |x|, and convex.
double smooth_l1(double x, double epsilon);

// Log of the conditional density factor contributed by (t, state): the
// product of the step and turn factors, where a factor whose AR history
// window would reach before the series start (t < degree) is replaced by one.
// Scalar reference path, built on the public density functions; the kernel
// path in log_density_matrix must agree with it. state is a 0-based index.
double state_log_density(const StepTurnSeries& series, const Parameters& params,
                         const ModelSpec& spec, std::size_t t, int state);

// Fills the N x T state-major matrix out[state * T + t] of per-(t, state)
// log density factors using the active kernel backend. out must hold
// n_states * series.length() doubles.
void log_density_matrix(const StepTurnSeries& series, const PreparedSeries& prep,
                        const Parameters& params, const ModelSpec& spec, double* out);

// Scaled forward recursion over a precomputed log-density matrix (state-major
// layout as produced by log_density_matrix). Returns the conditional
// log-likelihood of the series. When predictive is non-null it receives the
// T x N row-major one-step-ahead state probabilities, row t holding
// P(S_t = . | x_1..t-1) (row 0 is the stationary distribution delta).
// Throws NumericError naming the track, time index and state when a density
// factor is NaN or +inf, or when every state's factor vanishes.
double forward_pass(const double* log_dens, std::size_t T, int n_states,
                    const std::vector<double>& delta,
                    const std::vector<std::vector<double>>& tpm,
                    const std::string& track_id, std::vector<double>* predictive = nullptr);

// Conditional log-likelihood of the pooled data (sum over series), with the
// initial distribution fixed at the stationary law of the transition matrix.
double cond_loglik(const PooledData& data, const Parameters& params,
                   const ModelSpec& spec);

// cond_loglik minus lambda * sum of smooth_l1 over every AR coefficient.
// With lambda = 0 this equals cond_loglik exactly.
double penalized_cond_loglik(const PooledData& data, const Parameters& params,
                             const ModelSpec& spec, const PenaltyConfig& penalty);

} // namespace arhmm
