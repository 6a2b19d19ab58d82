#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "collabtop/arms.hpp"

namespace collabtop {

struct ElimResult {
    std::vector<ArmId> survivors;  // exactly n_next arms, sorted by id
    std::vector<ArmId> accepted;   // sorted by id
};

// One elimination step on empirical means.
//
// Normal case (0 < m_r < |I|): with v = m_r-th and w = (m_r+1)-th highest
// empirical mean, rank arms by (gap, arm id) where
//   gap_i = max{mu_i - w, v - mu_i};
// the n_next lowest-ranked survive. Among the eliminated, the arms whose
// (mean desc, id asc) rank is at most m_r are accepted, which caps the
// accepted count at m_r even under ties at the boundary.
//
// Boundaries: m_r = 0 keeps the n_next highest means and accepts nothing;
// m_r = |I| keeps the n_next lowest and accepts everything eliminated.
inline ElimResult elim_decide(const std::vector<ArmId>& arms, const std::vector<double>& means,
                              int m_r, int n_next) {
    const int n = static_cast<int>(arms.size());
    if (static_cast<int>(means.size()) != n)
        throw std::invalid_argument("elim_decide: arms/means size mismatch");
    if (n == 0) throw std::invalid_argument("elim_decide: empty arm set");
    if (m_r < 0 || m_r > n) throw std::invalid_argument("elim_decide: inconsistent m_r");
    if (n_next < 0 || n_next >= n) throw std::invalid_argument("elim_decide: need 0 <= n_next < |I|");

    // Positions sorted by (mean desc, id asc); position of the j-th highest.
    std::vector<int> by_mean(static_cast<std::size_t>(n));
    std::iota(by_mean.begin(), by_mean.end(), 0);
    std::sort(by_mean.begin(), by_mean.end(), [&](int a, int b) {
        if (means[static_cast<std::size_t>(a)] != means[static_cast<std::size_t>(b)])
            return means[static_cast<std::size_t>(a)] > means[static_cast<std::size_t>(b)];
        return arms[static_cast<std::size_t>(a)] < arms[static_cast<std::size_t>(b)];
    });

    std::vector<double> gap(static_cast<std::size_t>(n));
    if (m_r == 0) {
        for (int j = 0; j < n; ++j) gap[static_cast<std::size_t>(j)] = -means[static_cast<std::size_t>(j)];
    } else if (m_r == n) {
        for (int j = 0; j < n; ++j) gap[static_cast<std::size_t>(j)] = means[static_cast<std::size_t>(j)];
    } else {
        const double v = means[static_cast<std::size_t>(by_mean[static_cast<std::size_t>(m_r - 1)])];
        const double w = means[static_cast<std::size_t>(by_mean[static_cast<std::size_t>(m_r)])];
        for (int j = 0; j < n; ++j)
            gap[static_cast<std::size_t>(j)] =
                std::max(means[static_cast<std::size_t>(j)] - w, v - means[static_cast<std::size_t>(j)]);
    }

    std::vector<int> by_gap(static_cast<std::size_t>(n));
    std::iota(by_gap.begin(), by_gap.end(), 0);
    std::sort(by_gap.begin(), by_gap.end(), [&](int a, int b) {
        if (gap[static_cast<std::size_t>(a)] != gap[static_cast<std::size_t>(b)])
            return gap[static_cast<std::size_t>(a)] < gap[static_cast<std::size_t>(b)];
        return arms[static_cast<std::size_t>(a)] < arms[static_cast<std::size_t>(b)];
    });

    std::vector<bool> survives(static_cast<std::size_t>(n), false);
    for (int j = 0; j < n_next; ++j) survives[static_cast<std::size_t>(by_gap[static_cast<std::size_t>(j)])] = true;

    ElimResult res;
    for (int j = 0; j < n; ++j)
        if (survives[static_cast<std::size_t>(j)]) res.survivors.push_back(arms[static_cast<std::size_t>(j)]);

    // Accept eliminated arms of mean-rank <= m_r.
    for (int rank = 0; rank < m_r; ++rank) {
        const int pos = by_mean[static_cast<std::size_t>(rank)];
        if (!survives[static_cast<std::size_t>(pos)]) res.accepted.push_back(arms[static_cast<std::size_t>(pos)]);
    }
    std::sort(res.survivors.begin(), res.survivors.end());
    std::sort(res.accepted.begin(), res.accepted.end());
    return res;
}

}  // namespace collabtop
