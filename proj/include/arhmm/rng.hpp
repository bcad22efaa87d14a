#pragma once

#include "arhmm/dists.hpp"

#include <array>
#include <cstdint>
#include <span>

namespace arhmm {

// Counter-based random stream (Philox 4x32-10). A stream is addressed by
// (seed, stream, substream); draws from one stream never perturb another, so
// simulations stay reproducible under any evaluation order. Each stream
// yields its own deterministic sequence of 32-bit words.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0,
                          std::uint64_t substream = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1); never returns an endpoint.
    double u01();
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller (two uniforms per draw, no caching).
    double normal();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> position_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    unsigned block_pos_ = 4;
};

// Deterministic seed mixing for named substreams (replicates, grid cells).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

namespace detail {
// Raw Philox 4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);
} // namespace detail

// Gamma draw in mean/SD parameterization (shape-boosted Marsaglia-Tsang).
double sample_gamma(RandomStream& rng, const GammaMeanSd& d);

// Von Mises draw (Best-Fisher wrapped-Cauchy envelope rejection); kappa below
// 1e-8 degenerates to the circular uniform. Result is wrapped into (-pi, pi].
double sample_vonmises(RandomStream& rng, const VonMises& d);

// Index draw from an unnormalized nonnegative weight vector.
int sample_categorical(RandomStream& rng, std::span<const double> weights);

} // namespace arhmm
