#pragma once

#include "arhmm/geometry.hpp"
#include "arhmm/model.hpp"

#include <string>
#include <vector>

namespace arhmm {

// Most-likely state labels for one series; entries are 1-based.
struct StateSequence {
    std::string track_id;
    std::vector<int> states;
};

// Normal pseudo-residuals for one series. Entries at indices the conditioning
// prefix makes undefined (t < max AR degree of the variable across states)
// are NaN. n_clamped counts forecast CDF values that had to be clamped away
// from 0/1 before the normal quantile.
struct ResidualSeries {
    std::string track_id;
    std::vector<double> r_step;
    std::vector<double> r_turn;
    int n_clamped = 0;
};

// Global decoding: the jointly most likely state path given the conditional
// likelihood factorization (initial distribution fixed at the stationary
// law). Ties break toward the lower state index.
StateSequence viterbi(const StepTurnSeries& series, const Parameters& params,
                      const ModelSpec& spec);

// Largest fraction of matching labels over all relabelings of `decoded`
// against `truth`. Sequences must have equal lengths; the label alphabet may
// not exceed 6 states.
double decoding_accuracy(const StateSequence& decoded, const StateSequence& truth);

// Same maximization with counts pooled across several sequences (one common
// relabeling for all of them).
double pooled_decoding_accuracy(const std::vector<StateSequence>& decoded,
                                const std::vector<StateSequence>& truth);

// One-step-ahead forecast pseudo-residuals: for each variable the forecast
// CDF under the state-probability-weighted mixture, mapped through the
// standard normal quantile. Under a correctly specified model these are
// approximately iid standard normal.
ResidualSeries pseudo_residuals(const StepTurnSeries& series, const Parameters& params,
                                const ModelSpec& spec);

} // namespace arhmm
