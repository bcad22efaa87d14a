#include "arhmm/decode.hpp"

#include "arhmm/core.hpp"
#include "arhmm/dists.hpp"
#include "arhmm/errors.hpp"
#include "arhmm/likelihood.hpp"
#include "arhmm/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace arhmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCdfClamp = 1e-12;

int alphabet_size(const std::vector<int>& states) {
    int n = 0;
    for (int s : states) {
        if (s < 1) throw ArgumentError("state labels must be 1-based positive integers");
        n = std::max(n, s);
    }
    return n;
}

double accuracy_over_relabelings(const std::vector<const StateSequence*>& decoded,
                                 const std::vector<const StateSequence*>& truth) {
    if (decoded.size() != truth.size())
        throw ArgumentError("decoding accuracy: sequence count mismatch");
    if (decoded.empty()) throw ArgumentError("decoding accuracy: no sequences");

    int n_labels = 1;
    std::size_t total = 0;
    for (std::size_t i = 0; i < decoded.size(); ++i) {
        if (decoded[i]->states.size() != truth[i]->states.size())
            throw ArgumentError("decoding accuracy: length mismatch for track '" +
                                decoded[i]->track_id + "'");
        total += decoded[i]->states.size();
        n_labels = std::max(n_labels, alphabet_size(decoded[i]->states));
        n_labels = std::max(n_labels, alphabet_size(truth[i]->states));
    }
    if (total == 0) throw ArgumentError("decoding accuracy: empty sequences");
    if (n_labels > 6)
        throw ArgumentError("decoding accuracy: more than 6 state labels");

    // Confusion counts c[d][t]: decoded label d against true label t.
    std::vector<std::vector<std::size_t>> counts(
        static_cast<std::size_t>(n_labels),
        std::vector<std::size_t>(static_cast<std::size_t>(n_labels), 0));
    for (std::size_t i = 0; i < decoded.size(); ++i) {
        for (std::size_t t = 0; t < decoded[i]->states.size(); ++t) {
            counts[static_cast<std::size_t>(decoded[i]->states[t] - 1)]
                  [static_cast<std::size_t>(truth[i]->states[t] - 1)] += 1;
        }
    }

    std::vector<int> perm(static_cast<std::size_t>(n_labels));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (int d = 0; d < n_labels; ++d)
            hits += counts[static_cast<std::size_t>(d)]
                          [static_cast<std::size_t>(perm[static_cast<std::size_t>(d)])];
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(total);
}

} // namespace

StateSequence viterbi(const StepTurnSeries& series, const Parameters& params,
                      const ModelSpec& spec) {
    spec.validate();
    params.validate(spec);
    validate_series(series);
    const std::size_t T = series.length();
    const auto N = static_cast<std::size_t>(spec.n_states);

    const PreparedSeries prep = prepare_series(series);
    std::vector<double> log_dens(N * T);
    log_density_matrix(series, prep, params, spec, log_dens.data());

    const std::vector<double> delta = stationary_dist(params.tpm);
    std::vector<std::vector<double>> log_tpm(N, std::vector<double>(N));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) log_tpm[i][j] = std::log(params.tpm[i][j]);

    std::vector<double> score(N);
    std::vector<double> score_next(N);
    std::vector<std::vector<int>> back(T, std::vector<int>(N, 0));
    for (std::size_t j = 0; j < N; ++j)
        score[j] = std::log(delta[j]) + log_dens[j * T + 0];

    for (std::size_t t = 1; t < T; ++t) {
        for (std::size_t j = 0; j < N; ++j) {
            double best = -kInf;
            int arg = 0;
            for (std::size_t i = 0; i < N; ++i) {
                const double cand = score[i] + log_tpm[i][j];
                if (cand > best) {
                    best = cand;
                    arg = static_cast<int>(i);
                }
            }
            score_next[j] = best + log_dens[j * T + t];
            back[t][j] = arg;
        }
        score.swap(score_next);
    }

    StateSequence out;
    out.track_id = series.track_id;
    out.states.resize(T);
    int arg = 0;
    double best = -kInf;
    for (std::size_t j = 0; j < N; ++j) {
        if (score[j] > best) {
            best = score[j];
            arg = static_cast<int>(j);
        }
    }
    if (best == -kInf)
        throw NumericError("viterbi: every state path has zero likelihood (track '" +
                           series.track_id + "')");
    for (std::size_t t = T; t-- > 0;) {
        out.states[t] = arg + 1;
        if (t > 0) arg = back[t][static_cast<std::size_t>(arg)];
    }
    return out;
}

double decoding_accuracy(const StateSequence& decoded, const StateSequence& truth) {
    return accuracy_over_relabelings({&decoded}, {&truth});
}

double pooled_decoding_accuracy(const std::vector<StateSequence>& decoded,
                                const std::vector<StateSequence>& truth) {
    std::vector<const StateSequence*> d;
    std::vector<const StateSequence*> t;
    d.reserve(decoded.size());
    t.reserve(truth.size());
    for (const auto& s : decoded) d.push_back(&s);
    for (const auto& s : truth) t.push_back(&s);
    return accuracy_over_relabelings(d, t);
}

ResidualSeries pseudo_residuals(const StepTurnSeries& series, const Parameters& params,
                                const ModelSpec& spec) {
    spec.validate();
    params.validate(spec);
    validate_series(series);
    const std::size_t T = series.length();
    const auto N = static_cast<std::size_t>(spec.n_states);

    const PreparedSeries prep = prepare_series(series);
    std::vector<double> log_dens(N * T);
    log_density_matrix(series, prep, params, spec, log_dens.data());
    const std::vector<double> delta = stationary_dist(params.tpm);

    std::vector<double> predictive;
    forward_pass(log_dens.data(), T, spec.n_states, delta, params.tpm, series.track_id,
                 &predictive);

    const auto prefix_step = static_cast<std::size_t>(spec.max_p_step());
    const auto prefix_turn = static_cast<std::size_t>(spec.max_p_turn());

    ResidualSeries out;
    out.track_id = series.track_id;
    out.r_step.assign(T, std::numeric_limits<double>::quiet_NaN());
    out.r_turn.assign(T, std::numeric_limits<double>::quiet_NaN());

    std::vector<double> hist;
    for (std::size_t t = 0; t < T; ++t) {
        if (t >= prefix_step) {
            double u = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                const auto& phi = params.phi_step[j];
                hist.resize(phi.size());
                for (std::size_t k = 0; k < phi.size(); ++k)
                    hist[k] = series.steps[t - 1 - k];
                const double mean = ar_step_mean(hist, phi, params.mu_step[j]);
                u += predictive[t * N + j] *
                     gamma_cdf(series.steps[t],
                               GammaMeanSd{mean, params.cv_step[j] * mean});
            }
            if (u < kCdfClamp) {
                u = kCdfClamp;
                ++out.n_clamped;
            } else if (u > 1.0 - kCdfClamp) {
                u = 1.0 - kCdfClamp;
                ++out.n_clamped;
            }
            out.r_step[t] = normal_quantile(u);
        }
        if (t >= prefix_turn) {
            double u = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                const auto& phi = params.phi_turn[j];
                hist.resize(phi.size());
                for (std::size_t k = 0; k < phi.size(); ++k)
                    hist[k] = series.turns[t - 1 - k];
                const double mean = ar_turn_mean(hist, phi, params.mu_turn[j]);
                u += predictive[t * N + j] *
                     vonmises_cdf(series.turns[t], VonMises{mean, params.kappa_turn[j]});
            }
            if (u < kCdfClamp) {
                u = kCdfClamp;
                ++out.n_clamped;
            } else if (u > 1.0 - kCdfClamp) {
                u = 1.0 - kCdfClamp;
                ++out.n_clamped;
            }
            out.r_turn[t] = normal_quantile(u);
        }
    }
    return out;
}

} // namespace arhmm
