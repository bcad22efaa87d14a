#pragma once

#include "arhmm/decode.hpp"
#include "arhmm/geometry.hpp"
#include "arhmm/model.hpp"

#include <cstdint>
#include <string>

namespace arhmm {

struct SimScenario {
    ModelSpec spec;
    Parameters params;
    std::size_t T = 2000;
    std::uint64_t seed = 0;
    std::string track_id = "sim";
};

struct SimResult {
    StepTurnSeries series;
    StateSequence states; // true generating states, 1-based
};

// Exact generative draw from the model: the state chain starts in its
// stationary distribution; within the first max degree of each variable the
// not-yet-filled AR window is replaced by the steady-state mean (the warm-up
// convention the conditional likelihood mirrors). Every (time, variable) pair
// draws from its own counter-based stream, so a given (seed, T) reproduces
// bit-identically regardless of platform or evaluation order.
SimResult simulate(const SimScenario& scenario);

// Two-state benchmark scenario with medium state overlap used across the
// simulation studies; degree selects the common AR order 0..3 of both
// variables in both states.
SimScenario benchmark_scenario(int degree);

} // namespace arhmm
