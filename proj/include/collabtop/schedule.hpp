#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace collabtop {

enum class Variant { iid, noniid };

// ceil(log2(n)) for n >= 1
inline int ceil_log2(long long n) {
    if (n <= 1) return 0;
    return static_cast<int>(std::bit_width(static_cast<unsigned long long>(n - 1)));
}

// Round structure shared by both elimination algorithms.
//   rounds      R = ceil(log2 n)
//   arms_left   n_r = floor(n / 2^r) for r < R, and n_R = 0: the final round
//               decides every remaining arm so the accepted set reaches size m
//   pull_budget T_r, cumulative per-arm pulls after round r-1; T_0 = 0 and
//               T_r = floor(T*K*2^r / (c*n*R)) with c = 4 (iid) or 2 (non-iid)
struct RoundSchedule {
    int rounds = 0;
    std::vector<long long> arms_left;
    std::vector<long long> pull_budget;
};

inline RoundSchedule round_schedule(int n, long long T, int K, Variant variant) {
    if (n < 2) throw std::invalid_argument("round_schedule: need n >= 2");
    if (T < 0) throw std::invalid_argument("round_schedule: need T >= 0");
    if (K < 1) throw std::invalid_argument("round_schedule: need K >= 1");
    RoundSchedule s;
    s.rounds = ceil_log2(n);
    const int R = s.rounds;
    s.arms_left.resize(static_cast<std::size_t>(R) + 1);
    s.pull_budget.resize(static_cast<std::size_t>(R) + 1);
    for (int r = 0; r <= R; ++r) s.arms_left[static_cast<std::size_t>(r)] = n >> r;
    s.arms_left[static_cast<std::size_t>(R)] = 0;
    s.pull_budget[0] = 0;
    const unsigned __int128 den =
        static_cast<unsigned __int128>(variant == Variant::iid ? 4 : 2) * n * R;
    for (int r = 1; r <= R; ++r) {
        const unsigned __int128 num = static_cast<unsigned __int128>(T) * K *
                                      (static_cast<unsigned __int128>(1) << r);
        s.pull_budget[static_cast<std::size_t>(r)] = static_cast<long long>(num / den);
    }
    return s;
}

// Lower bound on the success probability of the iid algorithm:
//   1 - 2n*log2(2n)*exp(-T*K / (128*H*log2(2n))), clamped to [0, 1].
inline double success_bound(int n, double T, int K, double hardness) {
    if (hardness <= 0.0) throw std::invalid_argument("success_bound: need H > 0");
    const double log2n2 = std::log2(2.0 * n);
    const double bound =
        1.0 - 2.0 * n * log2n2 * std::exp(-(T * K) / (128.0 * hardness * log2n2));
    return bound < 0.0 ? 0.0 : (bound > 1.0 ? 1.0 : bound);
}

}  // namespace collabtop
