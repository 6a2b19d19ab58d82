#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "collabtop/arms.hpp"
#include "collabtop/collab_search.hpp"
#include "collabtop/elim.hpp"
#include "collabtop/fabric.hpp"
#include "collabtop/outcome.hpp"
#include "collabtop/poly_hash.hpp"
#include "collabtop/pull_dist.hpp"
#include "collabtop/rng.hpp"
#include "collabtop/schedule.hpp"

namespace collabtop {

// Running pull statistics for one arm at one agent. The reward stream is
// seeded from (run seed, agent, arm) so trial results do not depend on the
// order in which pulls are simulated.
struct ArmStats {
    long long count = 0;
    double sum = 0.0;
    std::mt19937_64 rng;
};

// State held by one simulated agent during the local phase.
struct AgentState {
    std::vector<ArmId> surviving;  // I_r^k, sorted by arm id
    std::vector<ArmId> accepted;   // Q_r^k
    std::vector<ArmStats> stats;   // indexed by arm id, [0] unused
};

namespace detail {

// Sentinel thresholds for the degenerate slot counts. Means live in [0,1],
// so 2.0 flags "no slots left" (eliminate lowest means, accept nothing) and
// -1.0 flags "every remaining arm is wanted" (accept everything eliminated).
constexpr double kNoSlotSentinel = 2.0;
constexpr double kAllWantedSentinel = -1.0;

class IidRun {
  public:
    IidRun(const Instance& inst, int m, int K, long long T, std::uint64_t seed, CommFabric& fabric)
        : inst_(inst), n_(inst.n()), m_(m), agents_count_(K), seed_(seed), fabric_(fabric) {
        inst_.validate();
        if (m < 1) throw std::invalid_argument("run_iid: need m >= 1");
        if (n_ < 2 * m) throw std::invalid_argument("run_iid: need n >= 2m");
        if (K < 1) throw std::invalid_argument("run_iid: need K >= 1");
        if (T < 0) throw std::invalid_argument("run_iid: need T >= 0");
        if (fabric.num_agents() != K || fabric.round() != 0)
            throw std::invalid_argument("run_iid: fabric must be fresh with K agents");
        compute_gaps(inst.means, m);  // rejects degenerate instances
        schedule_ = round_schedule(n_, T, K, Variant::iid);
    }

    Outcome run() {
        setup();
        const int R = schedule_.rounds;
        int r = 0;
        bool local_phase = true;
        while (r < R) {
            fabric_.advance_round();
            const std::uint64_t words_at_start = fabric_.words_total();
            if (local_phase) {
                std::vector<long long> sizes(static_cast<std::size_t>(agents_count_));
                for (int k = 0; k < agents_count_; ++k) {
                    sizes[static_cast<std::size_t>(k)] =
                        static_cast<long long>(agents_[static_cast<std::size_t>(k)].surviving.size());
                    fabric_.post(Endpoint::agent(k), Endpoint::coordinator(), 1, fabric_.round());
                }
                if (is_balanced(sizes)) {
                    local_round(r);
                    record_round(r, true, words_at_start);
                    ++r;
                    continue;
                }
                local_phase = false;
                handoff();
            }
            global_round(r);
            record_round(r, false, words_at_start);
            ++r;
        }
        if (local_phase) handoff();  // balanced to the end; coordinator collects Q_R

        fabric_.post(Endpoint::coordinator(), Endpoint::environment(),
                     static_cast<std::uint64_t>(m_), fabric_.round());
        return finalize();
    }

  private:
    void setup() {
        std::mt19937_64 hash_rng(mix_seed(seed_, 0x48415348ull));
        fabric_.advance_round();
        const PolyHash hash = sample_hash(n_, agents_count_, hash_rng);
        fabric_.post(Endpoint::coordinator(), Endpoint::broadcast(), hash.word_count(), fabric_.round());

        agents_.resize(static_cast<std::size_t>(agents_count_));
        for (int k = 0; k < agents_count_; ++k) {
            AgentState& a = agents_[static_cast<std::size_t>(k)];
            a.stats.resize(static_cast<std::size_t>(n_) + 1);
            for (ArmId arm = 1; arm <= n_; ++arm)
                a.stats[static_cast<std::size_t>(arm)].rng.seed(
                    mix_seed(mix_seed(seed_, 0x41524D00ull + static_cast<std::uint64_t>(k)),
                             static_cast<std::uint64_t>(arm)));
        }
        for (ArmId i = 1; i <= n_; ++i)
            agents_[static_cast<std::size_t>(hash.eval(i))].surviving.push_back(i);

        m_r_ = m_;
        coord_count_.assign(static_cast<std::size_t>(n_) + 1, 0);
        coord_sum_.assign(static_cast<std::size_t>(n_) + 1, 0.0);
    }

    double mu_hat(const AgentState& a, ArmId arm, long long t_cum) const {
        return t_cum == 0 ? 0.0 : a.stats[static_cast<std::size_t>(arm)].sum / static_cast<double>(t_cum);
    }

    void pull_local(int r) {
        const long long dt = schedule_.pull_budget[static_cast<std::size_t>(r) + 1] -
                             schedule_.pull_budget[static_cast<std::size_t>(r)];
        if (dt == 0) return;
        for (int k = 0; k < agents_count_; ++k) {
            AgentState& a = agents_[static_cast<std::size_t>(k)];
            for (ArmId arm : a.surviving) {
                const RewardSampler sampler = inst_.sampler(arm);
                ArmStats& st = a.stats[static_cast<std::size_t>(arm)];
                for (long long t = 0; t < dt; ++t) st.sum += sampler.draw(st.rng);
                st.count += dt;
            }
            fabric_.record_pulls(k, static_cast<long long>(a.surviving.size()) * dt);
        }
    }

    void local_round(int r) {
        const int round = fabric_.round();
        const long long n_r = schedule_.arms_left[static_cast<std::size_t>(r)];
        const long long n_next = schedule_.arms_left[static_cast<std::size_t>(r) + 1];
        const long long t_cum = schedule_.pull_budget[static_cast<std::size_t>(r) + 1];
        pull_local(r);

        // Highest-mean candidates: each agent reports its top (m+1) empirical
        // means, padded with sentinels so the message width is fixed.
        const int depth = m_ + 1;
        std::vector<std::vector<double>> lists(static_cast<std::size_t>(agents_count_));
        for (int k = 0; k < agents_count_; ++k) {
            AgentState& a = agents_[static_cast<std::size_t>(k)];
            std::vector<double>& lst = lists[static_cast<std::size_t>(k)];
            for (ArmId arm : a.surviving) lst.push_back(mu_hat(a, arm, t_cum));
            std::sort(lst.begin(), lst.end(), std::greater<double>());
            lst.resize(static_cast<std::size_t>(depth), -1.0);
            fabric_.post(Endpoint::agent(k), Endpoint::coordinator(),
                         static_cast<std::uint64_t>(depth), round);
        }

        // Coordinator resolves the mean thresholds.
        double v_star = kNoSlotSentinel, v_next = kNoSlotSentinel;
        const bool no_slots = (m_r_ == 0);
        const bool all_wanted = (m_r_ == static_cast<int>(n_r));
        if (all_wanted) {
            v_star = kAllWantedSentinel;
            v_next = kAllWantedSentinel;
        } else if (!no_slots) {
            std::vector<double> merged;
            for (const auto& lst : lists)
                for (double v : lst)
                    if (v >= 0.0) merged.push_back(v);
            std::sort(merged.begin(), merged.end(), std::greater<double>());
            v_star = merged[static_cast<std::size_t>(m_r_ - 1)];
            v_next = merged[static_cast<std::size_t>(m_r_)];
        }
        fabric_.post(Endpoint::coordinator(), Endpoint::broadcast(), 2, round);

        // Tie counts at the acceptance threshold, then per-agent quotas.
        std::vector<long long> tied(static_cast<std::size_t>(agents_count_), 0);
        long long sure_global = 0;
        for (int k = 0; k < agents_count_; ++k) {
            if (!no_slots && !all_wanted) {
                AgentState& a = agents_[static_cast<std::size_t>(k)];
                for (ArmId arm : a.surviving)
                    if (mu_hat(a, arm, t_cum) == v_star) ++tied[static_cast<std::size_t>(k)];
                for (double v : lists[static_cast<std::size_t>(k)])
                    if (v > v_star) ++sure_global;
            }
            fabric_.post(Endpoint::agent(k), Endpoint::coordinator(), 1, round);
        }
        std::vector<long long> accept_quota(static_cast<std::size_t>(agents_count_), 0);
        if (!no_slots && !all_wanted) {
            long long need = m_r_ - sure_global;
            for (int k = 0; k < agents_count_ && need > 0; ++k) {
                accept_quota[static_cast<std::size_t>(k)] = std::min(tied[static_cast<std::size_t>(k)], need);
                need -= accept_quota[static_cast<std::size_t>(k)];
            }
        }
        for (int k = 0; k < agents_count_; ++k)
            fabric_.post(Endpoint::coordinator(), Endpoint::agent(k), 1, round);

        // Local gap values.
        std::vector<std::vector<double>> gap_sets(static_cast<std::size_t>(agents_count_));
        for (int k = 0; k < agents_count_; ++k) {
            AgentState& a = agents_[static_cast<std::size_t>(k)];
            auto& gaps = gap_sets[static_cast<std::size_t>(k)];
            gaps.reserve(a.surviving.size());
            for (ArmId arm : a.surviving) {
                const double mu = mu_hat(a, arm, t_cum);
                double g;
                if (no_slots)
                    g = -mu;
                else if (all_wanted)
                    g = mu;
                else
                    g = std::max(mu - v_next, v_star - mu);
                gaps.push_back(g);
            }
        }

        // Survivor threshold: the n_{r+1}-th smallest gap, plus per-agent
        // keep-quotas for arms tied exactly at the threshold. The final round
        // (n_{r+1} = 0) eliminates everything and skips the search.
        double gap_threshold = 0.0;
        std::vector<long long> survive_quota(static_cast<std::size_t>(agents_count_), 0);
        bool have_threshold = false;
        if (n_next > 0) {
            SearchOptions sopt;
            sopt.oblivious = true;
            sopt.padded_iterations = ceil_log2(std::max<long long>(n_r, 2)) + 2;
            sopt.charge_sizes = false;
            const SearchOutcome found = collab_search(fabric_, gap_sets, n_next, sopt);
            gap_threshold = found.value;
            have_threshold = true;
            long long need = n_next - found.below;
            for (int k = 0; k < agents_count_ && need > 0; ++k) {
                survive_quota[static_cast<std::size_t>(k)] =
                    std::min(found.tied_by_agent[static_cast<std::size_t>(k)], need);
                need -= survive_quota[static_cast<std::size_t>(k)];
            }
            assert(need == 0);
            for (int k = 0; k < agents_count_; ++k)
                fabric_.post(Endpoint::coordinator(), Endpoint::agent(k), 2, round);
        }

        // Agents split survivors / eliminated / accepted locally and report
        // only their acceptance counts.
        long long accepted_now = 0;
        for (int k = 0; k < agents_count_; ++k) {
            AgentState& a = agents_[static_cast<std::size_t>(k)];
            std::vector<ArmId> keep, elim;
            long long keep_ties_left = survive_quota[static_cast<std::size_t>(k)];
            for (std::size_t j = 0; j < a.surviving.size(); ++j) {
                const double g = gap_sets[static_cast<std::size_t>(k)][j];
                bool survives = false;
                if (have_threshold) {
                    if (g < gap_threshold) {
                        survives = true;
                    } else if (g == gap_threshold && keep_ties_left > 0) {
                        survives = true;
                        --keep_ties_left;
                    }
                }
                (survives ? keep : elim).push_back(a.surviving[j]);
            }
            long long accept_ties_left = accept_quota[static_cast<std::size_t>(k)];
            std::vector<ArmId> newly_accepted;
            for (ArmId arm : elim) {
                if (no_slots) break;
                if (all_wanted) {
                    newly_accepted.push_back(arm);
                    continue;
                }
                const double mu = mu_hat(a, arm, t_cum);
                if (mu > v_star) {
                    newly_accepted.push_back(arm);
                } else if (mu == v_star && accept_ties_left > 0) {
                    newly_accepted.push_back(arm);
                    --accept_ties_left;
                }
            }
            a.surviving = std::move(keep);
            a.accepted.insert(a.accepted.end(), newly_accepted.begin(), newly_accepted.end());
            accepted_now += static_cast<long long>(newly_accepted.size());
            fabric_.post(Endpoint::agent(k), Endpoint::coordinator(), 1, round);
        }
        m_r_ -= static_cast<int>(accepted_now);
        assert(m_r_ >= 0);
    }

    // Phase hand-off: surviving arms with their empirical means, and the
    // locally accepted sets, move to the coordinator.
    void handoff() {
        const int round = fabric_.round();
        const long long t_cum =
            schedule_.pull_budget[static_cast<std::size_t>(completed_local_rounds_)];
        for (int k = 0; k < agents_count_; ++k) {
            AgentState& a = agents_[static_cast<std::size_t>(k)];
            if (!a.surviving.empty()) {
                fabric_.post(Endpoint::agent(k), Endpoint::coordinator(), a.surviving.size(), round);
                fabric_.post(Endpoint::agent(k), Endpoint::coordinator(), a.surviving.size(), round);
                for (ArmId arm : a.surviving) {
                    coord_arms_.push_back(arm);
                    coord_count_[static_cast<std::size_t>(arm)] = t_cum;
                    coord_sum_[static_cast<std::size_t>(arm)] =
                        mu_hat(a, arm, t_cum) * static_cast<double>(t_cum);
                }
            }
            if (!a.accepted.empty()) {
                fabric_.post(Endpoint::agent(k), Endpoint::coordinator(), a.accepted.size(), round);
                coord_accepted_.insert(coord_accepted_.end(), a.accepted.begin(), a.accepted.end());
            }
        }
        std::sort(coord_arms_.begin(), coord_arms_.end());
    }

    void global_round(int r) {
        const int round = fabric_.round();
        const long long n_next = schedule_.arms_left[static_cast<std::size_t>(r) + 1];
        const long long t_cum = schedule_.pull_budget[static_cast<std::size_t>(r) + 1];
        const long long dt = t_cum - schedule_.pull_budget[static_cast<std::size_t>(r)];

        if (dt > 0 && !coord_arms_.empty()) {
            const Assignment plan = balanced_pull_dist(coord_arms_, dt, agents_count_);
            // Assignments and reports use fixed-width per-agent frames sized
            // to the worst-case task count, so the schedule stays data-free.
            const std::uint64_t slots =
                static_cast<std::uint64_t>(coord_arms_.size() / static_cast<std::size_t>(agents_count_)) + 2;
            for (int k = 0; k < agents_count_; ++k) {
                assert(static_cast<std::uint64_t>(plan.agent_task_count(k)) <= slots);
                fabric_.post(Endpoint::coordinator(), Endpoint::agent(k), 2 * slots, round);
                fabric_.post(Endpoint::agent(k), Endpoint::coordinator(), slots, round);
            }
            std::vector<long long> pulls(static_cast<std::size_t>(agents_count_), 0);
            for (const PullTask& task : plan.tasks) {
                ArmStats& st =
                    agents_[static_cast<std::size_t>(task.agent)].stats[static_cast<std::size_t>(task.arm)];
                const RewardSampler sampler = inst_.sampler(task.arm);
                double s = 0.0;
                for (long long t = 0; t < task.count; ++t) s += sampler.draw(st.rng);
                coord_sum_[static_cast<std::size_t>(task.arm)] += s;
                coord_count_[static_cast<std::size_t>(task.arm)] += task.count;
                pulls[static_cast<std::size_t>(task.agent)] += task.count;
            }
            for (int k = 0; k < agents_count_; ++k)
                fabric_.record_pulls(k, pulls[static_cast<std::size_t>(k)]);
        }
        for (ArmId arm : coord_arms_)
            assert(coord_count_[static_cast<std::size_t>(arm)] == t_cum);

        std::vector<double> means;
        means.reserve(coord_arms_.size());
        for (ArmId arm : coord_arms_)
            means.push_back(
                t_cum == 0 ? 0.0
                           : coord_sum_[static_cast<std::size_t>(arm)] / static_cast<double>(t_cum));
        const ElimResult res = elim_decide(coord_arms_, means, m_r_, static_cast<int>(n_next));
        coord_arms_ = res.survivors;
        coord_accepted_.insert(coord_accepted_.end(), res.accepted.begin(), res.accepted.end());
        m_r_ -= static_cast<int>(res.accepted.size());
    }

    void record_round(int r, bool local, std::uint64_t words_at_start) {
        RoundStat st;
        st.r = r;
        st.local_phase = local;
        long long survivors = static_cast<long long>(coord_arms_.size());
        long long accepted = static_cast<long long>(coord_accepted_.size());
        if (local) {
            survivors = 0;
            accepted = 0;
            for (const AgentState& a : agents_) {
                survivors += static_cast<long long>(a.surviving.size());
                accepted += static_cast<long long>(a.accepted.size());
            }
            ++completed_local_rounds_;
        }
        st.survivors = survivors;
        st.accepted_total = accepted;
        st.m_remaining = m_r_;
        st.round_words = fabric_.words_total() - words_at_start;
        trace_.push_back(st);
    }

    Outcome finalize() {
        Outcome out;
        out.selected = coord_accepted_;
        std::sort(out.selected.begin(), out.selected.end());
        out.success = out.selected == top_m(inst_.means, m_);
        out.words_total = fabric_.words_total();
        out.rounds_used = fabric_.transcript().rounds_used;
        out.max_pulls_per_agent = fabric_.max_pulls();
        out.round_trace = trace_;
        return out;
    }

    const Instance& inst_;
    int n_;
    int m_;
    int agents_count_;
    std::uint64_t seed_;
    CommFabric& fabric_;
    RoundSchedule schedule_;

    std::vector<AgentState> agents_;
    int m_r_ = 0;
    int completed_local_rounds_ = 0;
    std::vector<ArmId> coord_arms_;
    std::vector<long long> coord_count_;
    std::vector<double> coord_sum_;
    std::vector<ArmId> coord_accepted_;
    std::vector<RoundStat> trace_;
};

}  // namespace detail

// Two-phase collaborative top-m identification on iid data: local
// elimination while the hash partition stays balanced, then coordinated
// elimination on the pooled survivors.
inline Outcome run_iid(const Instance& inst, int m, int K, long long T, std::uint64_t seed,
                       CommFabric& fabric) {
    detail::IidRun run(inst, m, K, T, seed, fabric);
    return run.run();
}

inline Outcome run_iid(const Instance& inst, int m, int K, long long T, std::uint64_t seed) {
    CommFabric fabric(K, T);
    return run_iid(inst, m, K, T, seed, fabric);
}

}  // namespace collabtop
