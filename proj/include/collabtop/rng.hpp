#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace collabtop {

// Stateless 64-bit mixer (splitmix64 finalizer). All seed derivation goes
// through this so that trials and per-(agent, arm) streams are reproducible
// and independent of evaluation order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b + 0x9E3779B97F4A7C15ull));
}

// Uniform double in [0, 1) from the top 53 bits. Avoids
// std::uniform_real_distribution, whose output is implementation-defined.
inline double canonical_double(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection sampling.
inline std::uint64_t uniform_below(std::mt19937_64& g, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t cutoff = max - max % bound;  // multiple of bound
    for (;;) {
        const std::uint64_t x = g();
        if (x < cutoff) return x % bound;
    }
}

enum class SamplerKind { bernoulli, constant, truncated_normal };

// Per-arm reward source with support [0, 1]. `constant` returns the mean
// exactly (useful for injecting deterministic samples in tests);
// `truncated_normal` clamps a Gaussian draw to [0, 1].
struct RewardSampler {
    SamplerKind kind = SamplerKind::bernoulli;
    double mean = 0.0;
    double stddev = 0.0;

    double draw(std::mt19937_64& g) const {
        switch (kind) {
            case SamplerKind::bernoulli:
                return canonical_double(g) < mean ? 1.0 : 0.0;
            case SamplerKind::constant:
                return mean;
            case SamplerKind::truncated_normal: {
                const double u1 = 1.0 - canonical_double(g);  // (0, 1]
                const double u2 = canonical_double(g);
                const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
                const double v = mean + stddev * z;
                return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
            }
        }
        return 0.0;
    }
};

}  // namespace collabtop
