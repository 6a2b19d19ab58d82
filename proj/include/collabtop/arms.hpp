#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "collabtop/rng.hpp"

namespace collabtop {

// Arms are identified by a 1-based index that is stable across rounds.
using ArmId = int;

// A bandit instance: one reward distribution per arm, support [0, 1].
struct Instance {
    std::vector<double> means;
    SamplerKind kind = SamplerKind::bernoulli;
    double stddev = 0.0;  // truncated_normal only

    int n() const { return static_cast<int>(means.size()); }

    RewardSampler sampler(ArmId arm) const {
        return RewardSampler{kind, means[static_cast<std::size_t>(arm - 1)], stddev};
    }

    void validate() const {
        if (means.empty()) throw std::invalid_argument("instance: no arms");
        for (double mu : means)
            if (!(mu >= 0.0 && mu <= 1.0))
                throw std::invalid_argument("instance: means must lie in [0,1]");
    }
};

// Agent-specific reward distributions: local_means[k][i-1] is the mean the
// k-th agent samples when pulling arm i. Rewards are Bernoulli.
struct NonIIDInstance {
    std::vector<std::vector<double>> local_means;  // K rows, n columns

    int agents() const { return static_cast<int>(local_means.size()); }
    int n() const { return local_means.empty() ? 0 : static_cast<int>(local_means[0].size()); }

    void validate() const {
        if (local_means.empty() || local_means[0].empty())
            throw std::invalid_argument("non-iid instance: empty matrix");
        const std::size_t cols = local_means[0].size();
        for (const auto& row : local_means) {
            if (row.size() != cols)
                throw std::invalid_argument("non-iid instance: ragged matrix");
            for (double mu : row)
                if (!(mu >= 0.0 && mu <= 1.0))
                    throw std::invalid_argument("non-iid instance: means must lie in [0,1]");
        }
    }
};

// mu_i = (1/K) sum_k mu_{i,k}
inline std::vector<double> global_means(const NonIIDInstance& inst) {
    inst.validate();
    const int K = inst.agents();
    const int n = inst.n();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (const auto& row : inst.local_means)
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i)];
    for (double& v : out) v /= K;
    return out;
}

struct GapProfile {
    std::vector<double> gaps;  // Delta_i, one per arm
    double hardness = 0.0;     // sum 1/Delta_i^2
};

// Delta_i = max{mu_i - mu_[m+1], mu_[m] - mu_i}, where mu_[m] is the m-th
// highest mean. Requires mu_[m] != mu_[m+1] (finite hardness).
inline GapProfile compute_gaps(const std::vector<double>& means, int m) {
    const int n = static_cast<int>(means.size());
    if (m < 1 || m >= n) throw std::invalid_argument("compute_gaps: need 1 <= m < n");
    std::vector<double> sorted(means);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    const double mu_m = sorted[static_cast<std::size_t>(m - 1)];
    const double mu_m1 = sorted[static_cast<std::size_t>(m)];
    if (mu_m == mu_m1)
        throw std::invalid_argument("compute_gaps: degenerate instance, mu_[m] == mu_[m+1]");
    GapProfile gp;
    gp.gaps.reserve(means.size());
    for (double mu : means) {
        const double d = std::max(mu - mu_m1, mu_m - mu);
        gp.gaps.push_back(d);
        gp.hardness += 1.0 / (d * d);
    }
    return gp;
}

// The m arms of highest mean; ties broken toward the lower arm index.
// Returned sorted by arm id.
inline std::vector<ArmId> top_m(const std::vector<double>& means, int m) {
    const int n = static_cast<int>(means.size());
    if (m < 1 || m > n) throw std::invalid_argument("top_m: need 1 <= m <= n");
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (means[static_cast<std::size_t>(a)] != means[static_cast<std::size_t>(b)])
            return means[static_cast<std::size_t>(a)] > means[static_cast<std::size_t>(b)];
        return a < b;
    });
    std::vector<ArmId> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) out.push_back(idx[static_cast<std::size_t>(j)] + 1);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace collabtop
