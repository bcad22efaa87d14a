#include "arhmm/simulate.hpp"

#include "arhmm/dists.hpp"
#include "arhmm/errors.hpp"
#include "arhmm/model.hpp"
#include "arhmm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace arhmm {

namespace {

// Substream tags: one independent stream per (time point, variable).
constexpr std::uint64_t kStateVar = 0;
constexpr std::uint64_t kStepVar = 1;
constexpr std::uint64_t kTurnVar = 2;

} // namespace

SimResult simulate(const SimScenario& sc) {
    sc.spec.validate();
    sc.params.validate(sc.spec);
    if (sc.T == 0) throw ArgumentError("simulate: T must be positive");

    const std::vector<double> delta = stationary_dist(sc.params.tpm);

    SimResult out;
    out.series.track_id = sc.track_id;
    out.states.track_id = sc.track_id;
    out.series.steps.resize(sc.T);
    out.series.turns.resize(sc.T);
    out.states.states.resize(sc.T);

    const auto warm_step = static_cast<std::size_t>(sc.spec.max_p_step());
    const auto warm_turn = static_cast<std::size_t>(sc.spec.max_p_turn());

    int state = 0;
    std::vector<double> hist;
    for (std::size_t t = 0; t < sc.T; ++t) {
        RandomStream state_rng(sc.seed, t, kStateVar);
        if (t == 0) {
            state = sample_categorical(state_rng, delta);
        } else {
            state = sample_categorical(state_rng, sc.params.tpm[static_cast<std::size_t>(state)]);
        }
        out.states.states[t] = state + 1;
        const auto j = static_cast<std::size_t>(state);

        // Step draw. During the warm-up window the AR coefficients are
        // treated as zero, so the mean is the steady-state mean.
        double step_mean = sc.params.mu_step[j];
        if (t >= warm_step && !sc.params.phi_step[j].empty()) {
            const auto& phi = sc.params.phi_step[j];
            hist.resize(phi.size());
            for (std::size_t k = 0; k < phi.size(); ++k)
                hist[k] = out.series.steps[t - 1 - k];
            step_mean = ar_step_mean(hist, phi, sc.params.mu_step[j]);
        }
        RandomStream step_rng(sc.seed, t, kStepVar);
        out.series.steps[t] = sample_gamma(
            step_rng, GammaMeanSd{step_mean, sc.params.cv_step[j] * step_mean});

        double turn_mean = sc.params.mu_turn[j];
        if (t >= warm_turn && !sc.params.phi_turn[j].empty()) {
            const auto& phi = sc.params.phi_turn[j];
            hist.resize(phi.size());
            for (std::size_t k = 0; k < phi.size(); ++k)
                hist[k] = out.series.turns[t - 1 - k];
            turn_mean = ar_turn_mean(hist, phi, sc.params.mu_turn[j]);
        }
        RandomStream turn_rng(sc.seed, t, kTurnVar);
        out.series.turns[t] =
            sample_vonmises(turn_rng, VonMises{turn_mean, sc.params.kappa_turn[j]});
    }
    return out;
}

SimScenario benchmark_scenario(int degree) {
    if (degree < 0 || degree > 3)
        throw ArgumentError("benchmark_scenario: degree must be in 0..3");

    SimScenario sc;
    sc.spec = ModelSpec::uniform(2, degree, degree);
    sc.T = 2000;

    Parameters& p = sc.params;
    p.tpm = {{0.9, 0.1}, {0.1, 0.9}};
    p.mu_step = {20.0, 40.0};
    p.cv_step = {5.0 / 20.0, 7.0 / 40.0}; // steady-state SDs (5, 7)
    p.mu_turn = {0.0, 0.0};
    p.kappa_turn = {2.0, 12.0};
    switch (degree) {
        case 0:
            p.phi_step = {{}, {}};
            p.phi_turn = {{}, {}};
            break;
        case 1:
            p.phi_step = {{0.45}, {0.55}};
            p.phi_turn = {{0.5}, {0.6}};
            break;
        case 2:
            p.phi_step = {{0.3, 0.15}, {0.4, 0.15}};
            p.phi_turn = {{0.3, 0.2}, {0.4, 0.2}};
            break;
        default:
            p.phi_step = {{0.25, 0.1, 0.1}, {0.35, 0.1, 0.1}};
            p.phi_turn = {{0.3, 0.1, 0.1}, {0.4, 0.1, 0.1}};
            break;
    }
    return sc;
}

} // namespace arhmm
