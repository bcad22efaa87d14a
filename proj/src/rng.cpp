#include "arhmm/rng.hpp"

#include "arhmm/core.hpp"
#include "arhmm/errors.hpp"

#include <cmath>

namespace arhmm {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// SplitMix64 finalizer; spreads (stream, substream) over the block position
// words so distinct addresses land on distinct counter blocks.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

namespace detail {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

} // namespace detail

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t substream) {
    key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const std::uint64_t pos = mix64(mix64(stream) ^ substream);
    position_ = {static_cast<std::uint32_t>(pos), static_cast<std::uint32_t>(pos >> 32)};
}

void RandomStream::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
        position_[0], position_[1]};
    block_ = detail::philox4x32_10(ctr, key_);
    ++counter_;
    block_pos_ = 0;
}

std::uint32_t RandomStream::next_u32() {
    if (block_pos_ >= 4) refill();
    return block_[block_pos_++];
}

std::uint64_t RandomStream::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RandomStream::u01() {
    // 53 random bits centered in the cell: (k + 0.5) * 2^-53 in (0, 1).
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1p-53;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

double RandomStream::normal() {
    const double u1 = u01();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
    std::uint64_t z = mix64(base ^ 0xA076u);
    z = mix64(z ^ a);
    z = mix64(z ^ b);
    z = mix64(z ^ c);
    return z;
}

double sample_gamma(RandomStream& rng, const GammaMeanSd& d) {
    if (!(d.mean > 0.0) || !(d.sd > 0.0))
        throw DomainError("sample_gamma: mean and sd must be positive");
    const double shape = (d.mean / d.sd) * (d.mean / d.sd);
    const double scale = d.sd * d.sd / d.mean; // 1 / rate

    double boost = 1.0;
    double a = shape;
    if (a < 1.0) {
        // Draw Gamma(a+1) and multiply by U^(1/a).
        boost = std::pow(rng.u01(), 1.0 / a);
        a += 1.0;
    }
    const double dd = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * dd);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.u01();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return boost * dd * v * scale;
        if (std::log(u) < 0.5 * x2 + dd * (1.0 - v + std::log(v)))
            return boost * dd * v * scale;
    }
}

double sample_vonmises(RandomStream& rng, const VonMises& d) {
    if (!(d.kappa >= 0.0)) throw DomainError("sample_vonmises: kappa must be >= 0");
    if (d.kappa < 1e-8) return wrap_angle(d.mu + (2.0 * rng.u01() - 1.0) * pi);

    const double a = 1.0 + std::sqrt(1.0 + 4.0 * d.kappa * d.kappa);
    const double b = (a - std::sqrt(2.0 * a)) / (2.0 * d.kappa);
    const double r = (1.0 + b * b) / (2.0 * b);
    for (;;) {
        const double z = std::cos(pi * rng.u01());
        const double f = (1.0 + r * z) / (r + z);
        const double c = d.kappa * (r - f);
        const double u2 = rng.u01();
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
            const double sign = rng.u01() > 0.5 ? 1.0 : -1.0;
            return wrap_angle(d.mu + sign * std::acos(f));
        }
    }
}

int sample_categorical(RandomStream& rng, std::span<const double> weights) {
    if (weights.empty()) throw ArgumentError("sample_categorical: empty weights");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw DomainError("sample_categorical: weights must be finite and >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw DomainError("sample_categorical: all weights are zero");
    const double u = rng.u01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

} // namespace arhmm
