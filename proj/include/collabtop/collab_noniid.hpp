#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "collabtop/arms.hpp"
#include "collabtop/elim.hpp"
#include "collabtop/fabric.hpp"
#include "collabtop/outcome.hpp"
#include "collabtop/rng.hpp"
#include "collabtop/schedule.hpp"

namespace collabtop {

namespace detail {

inline std::mt19937_64 noniid_stream(std::uint64_t seed, int agent, ArmId arm) {
    return std::mt19937_64(mix_seed(mix_seed(seed, 0x4E4F4E00ull + static_cast<std::uint64_t>(agent)),
                                    static_cast<std::uint64_t>(arm)));
}

inline long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

}  // namespace detail

// Top-m identification when agents sample agent-specific distributions and
// the target is the highest global (averaged) means. Every agent pulls every
// surviving arm; the coordinator averages local empirical means and runs the
// elimination step itself.
inline Outcome run_noniid(const NonIIDInstance& inst, int m, int K, long long T,
                          std::uint64_t seed, CommFabric& fabric) {
    inst.validate();
    const int n = inst.n();
    if (K != inst.agents()) throw std::invalid_argument("run_noniid: K must match the instance");
    if (m < 1) throw std::invalid_argument("run_noniid: need m >= 1");
    if (n < 2 * m) throw std::invalid_argument("run_noniid: need n >= 2m");
    if (T < 0) throw std::invalid_argument("run_noniid: need T >= 0");
    if (fabric.num_agents() != K || fabric.round() != 0)
        throw std::invalid_argument("run_noniid: fabric must be fresh with K agents");
    const std::vector<double> globals = global_means(inst);
    compute_gaps(globals, m);  // rejects degenerate instances

    const RoundSchedule schedule = round_schedule(n, T, K, Variant::noniid);
    const int R = schedule.rounds;

    // Per-agent pull statistics and reward streams, arm-indexed.
    std::vector<std::vector<ArmStats>> stats(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        stats[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(n) + 1);
        for (ArmId arm = 1; arm <= n; ++arm)
            stats[static_cast<std::size_t>(k)][static_cast<std::size_t>(arm)].rng =
                detail::noniid_stream(seed, k, arm);
    }

    std::vector<ArmId> surviving(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) surviving[static_cast<std::size_t>(i)] = i + 1;
    std::vector<ArmId> accepted;
    int m_r = m;
    std::vector<RoundStat> trace;

    for (int r = 0; r < R; ++r) {
        fabric.advance_round();
        const std::uint64_t words_at_start = fabric.words_total();
        const int round = fabric.round();
        const long long n_next = schedule.arms_left[static_cast<std::size_t>(r) + 1];
        // Every surviving arm reaches ceil(T_{r+1}/K) local pulls at every
        // agent after this round.
        const long long cum_local =
            detail::ceil_div(schedule.pull_budget[static_cast<std::size_t>(r) + 1], K);
        const long long prev_local =
            detail::ceil_div(schedule.pull_budget[static_cast<std::size_t>(r)], K);
        const long long dt = cum_local - prev_local;

        std::vector<double> mean_acc(surviving.size(), 0.0);
        for (int k = 0; k < K; ++k) {
            for (std::size_t j = 0; j < surviving.size(); ++j) {
                const ArmId arm = surviving[j];
                ArmStats& st = stats[static_cast<std::size_t>(k)][static_cast<std::size_t>(arm)];
                const RewardSampler sampler{
                    SamplerKind::bernoulli,
                    inst.local_means[static_cast<std::size_t>(k)][static_cast<std::size_t>(arm - 1)], 0.0};
                for (long long t = 0; t < dt; ++t) st.sum += sampler.draw(st.rng);
                st.count += dt;
                mean_acc[j] += cum_local == 0 ? 0.0 : st.sum / static_cast<double>(cum_local);
            }
            if (dt > 0)
                fabric.record_pulls(k, static_cast<long long>(surviving.size()) * dt);
            // Local empirical means, one word per surviving arm.
            fabric.post(Endpoint::agent(k), Endpoint::coordinator(), surviving.size(), round);
        }
        for (double& v : mean_acc) v /= K;

        const ElimResult res = elim_decide(surviving, mean_acc, m_r, static_cast<int>(n_next));
        surviving = res.survivors;
        accepted.insert(accepted.end(), res.accepted.begin(), res.accepted.end());
        m_r -= static_cast<int>(res.accepted.size());

        // Next round's survivor list goes back to each agent.
        if (!surviving.empty())
            fabric.post(Endpoint::coordinator(), Endpoint::broadcast(), surviving.size(), round);

        RoundStat st;
        st.r = r;
        st.local_phase = false;
        st.survivors = static_cast<long long>(surviving.size());
        st.accepted_total = static_cast<long long>(accepted.size());
        st.m_remaining = m_r;
        st.round_words = fabric.words_total() - words_at_start;
        trace.push_back(st);
    }

    fabric.post(Endpoint::coordinator(), Endpoint::environment(), static_cast<std::uint64_t>(m),
                fabric.round());

    Outcome out;
    out.selected = accepted;
    std::sort(out.selected.begin(), out.selected.end());
    out.success = out.selected == top_m(globals, m);
    out.words_total = fabric.words_total();
    out.rounds_used = fabric.transcript().rounds_used;
    out.max_pulls_per_agent = fabric.max_pulls();
    out.round_trace = trace;
    return out;
}

inline Outcome run_noniid(const NonIIDInstance& inst, int m, int K, long long T,
                          std::uint64_t seed) {
    CommFabric fabric(K, T);
    return run_noniid(inst, m, K, T, seed, fabric);
}

// One-round baseline: each agent pulls every arm floor(T/n) times and sends
// all n local means; the coordinator outputs the m arms of highest averaged
// mean. Mean transmission costs exactly K*n words.
inline Outcome uniform_baseline(const NonIIDInstance& inst, int m, int K, long long T,
                                std::uint64_t seed, CommFabric& fabric) {
    inst.validate();
    const int n = inst.n();
    if (K != inst.agents()) throw std::invalid_argument("uniform_baseline: K must match the instance");
    if (m < 1 || m > n) throw std::invalid_argument("uniform_baseline: need 1 <= m <= n");
    if (T < n) throw std::invalid_argument("uniform_baseline: need T >= n");
    if (fabric.num_agents() != K || fabric.round() != 0)
        throw std::invalid_argument("uniform_baseline: fabric must be fresh with K agents");

    const long long per_arm = T / n;
    fabric.advance_round();
    const int round = fabric.round();

    std::vector<double> avg(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < K; ++k) {
        for (ArmId arm = 1; arm <= n; ++arm) {
            auto rng = detail::noniid_stream(seed, k, arm);
            const RewardSampler sampler{
                SamplerKind::bernoulli,
                inst.local_means[static_cast<std::size_t>(k)][static_cast<std::size_t>(arm - 1)], 0.0};
            double sum = 0.0;
            for (long long t = 0; t < per_arm; ++t) sum += sampler.draw(rng);
            avg[static_cast<std::size_t>(arm - 1)] += sum / static_cast<double>(per_arm);
        }
        fabric.record_pulls(k, static_cast<long long>(n) * per_arm);
        fabric.post(Endpoint::agent(k), Endpoint::coordinator(), static_cast<std::uint64_t>(n), round);
    }
    for (double& v : avg) v /= K;

    fabric.post(Endpoint::coordinator(), Endpoint::environment(), static_cast<std::uint64_t>(m), round);

    Outcome out;
    out.selected = top_m(avg, m);
    out.success = out.selected == top_m(global_means(inst), m);
    out.words_total = fabric.words_total();
    out.rounds_used = fabric.transcript().rounds_used;
    out.max_pulls_per_agent = fabric.max_pulls();
    return out;
}

inline Outcome uniform_baseline(const NonIIDInstance& inst, int m, int K, long long T,
                                std::uint64_t seed) {
    CommFabric fabric(K, T);
    return uniform_baseline(inst, m, K, T, seed, fabric);
}

// K binary vectors of length n, one per agent.
struct DisjInput {
    std::vector<std::vector<std::uint8_t>> x;

    int agents() const { return static_cast<int>(x.size()); }
    int n() const { return x.empty() ? 0 : static_cast<int>(x[0].size()); }
};

// Set-disjointness hard-instance family: arm i gets local means
// (1 + X_i^k)/3 + i*delta with delta = 1/n^2, and a special arm n+1 whose
// local means all equal 2/3 - 1/(6K). For n > 6K the special arm has the
// highest global mean exactly when no coordinate is 1 at every agent.
inline NonIIDInstance disj_instance(const DisjInput& input) {
    const int K = input.agents();
    const int n = input.n();
    if (K < 1 || n < 1) throw std::invalid_argument("disj_instance: empty input");
    if (n <= 6 * K) throw std::invalid_argument("disj_instance: need n > 6K for separation");
    for (const auto& row : input.x) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("disj_instance: ragged input");
        for (std::uint8_t b : row)
            if (b > 1) throw std::invalid_argument("disj_instance: entries must be 0/1");
    }
    const double delta = 1.0 / (static_cast<double>(n) * n);
    const double special = 2.0 / 3.0 - 1.0 / (6.0 * K);
    NonIIDInstance inst;
    inst.local_means.assign(static_cast<std::size_t>(K),
                            std::vector<double>(static_cast<std::size_t>(n) + 1, special));
    for (int k = 0; k < K; ++k)
        for (int i = 1; i <= n; ++i)
            inst.local_means[static_cast<std::size_t>(k)][static_cast<std::size_t>(i - 1)] =
                (1.0 + input.x[static_cast<std::size_t>(k)][static_cast<std::size_t>(i - 1)]) / 3.0 +
                i * delta;
    return inst;
}

}  // namespace collabtop
