#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "collabtop/arms.hpp"
#include "collabtop/rng.hpp"

namespace collabtop {

// Polynomial hash over a prime field, used to partition arms among agents.
// Degree ceil(10 ln n) gives (10 ln n)-wise independence; sending the hash
// costs one word per coefficient. The fixed modulus 2^61 - 1 keeps the
// bias of the final reduction mod K below K/prime.
struct PolyHash {
    static constexpr std::uint64_t default_prime = (1ull << 61) - 1;

    std::uint64_t prime = default_prime;
    int num_agents = 1;
    std::vector<std::uint64_t> coefficients;  // c0 + c1*x + ... + cd*x^d

    // Horner evaluation at x = arm, reduced mod prime then mod K.
    int eval(ArmId arm) const {
        const unsigned __int128 x = static_cast<std::uint64_t>(arm) % prime;
        unsigned __int128 acc = 0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
            acc = (acc * x + *it) % prime;
        return static_cast<int>(acc % static_cast<unsigned>(num_agents));
    }

    // Flat word serialization: the prime is implied by the format version,
    // only coefficients are transmitted.
    std::size_t word_count() const { return coefficients.size(); }
};

inline PolyHash sample_hash(int n, int K, std::mt19937_64& rng) {
    if (n < 2) throw std::invalid_argument("sample_hash: need n >= 2");
    if (K < 1) throw std::invalid_argument("sample_hash: need K >= 1");
    PolyHash h;
    h.num_agents = K;
    const int degree = static_cast<int>(std::ceil(10.0 * std::log(static_cast<double>(n))));
    h.coefficients.resize(static_cast<std::size_t>(degree) + 1);
    for (auto& c : h.coefficients) c = uniform_below(rng, h.prime);
    return h;
}

// Factor-2 balance: every pair of subset sizes within [s/2, 2s], endpoints
// inclusive. Equivalent to 2*min >= max. An empty subset next to a nonempty
// one is unbalanced.
inline bool is_balanced(const std::vector<long long>& sizes) {
    if (sizes.empty()) throw std::invalid_argument("is_balanced: empty size list");
    long long lo = sizes[0], hi = sizes[0];
    for (long long s : sizes) {
        if (s < 0) throw std::invalid_argument("is_balanced: negative size");
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return 2 * lo >= hi;
}

}  // namespace collabtop
