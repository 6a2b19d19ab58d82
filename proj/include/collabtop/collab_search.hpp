#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "collabtop/fabric.hpp"

namespace collabtop {

// Result of a distributed order-statistic query. Besides the value itself,
// the coordinator learns the exact global and per-agent counts of elements
// strictly below / equal to the value, which callers use to split tied
// elements exactly at the rank boundary.
struct SearchOutcome {
    double value = 0.0;
    long long below = 0;
    long long tied = 0;
    std::vector<long long> below_by_agent;
    std::vector<long long> tied_by_agent;
};

struct SearchOptions {
    // Fixed message schedule: all K agents participate in every exchange
    // (empty agents send sentinels) and the pivot loop always runs
    // padded_iterations times, repeating idempotent exchanges once the rank
    // has been pinned. No endgame gather. Used inside protocol rounds where
    // the word schedule must not depend on the data.
    bool oblivious = false;
    int padded_iterations = 0;
    // Adaptive mode charges 2 words for the first up-leg (median + size);
    // protocol callers that already know the set sizes disable this.
    bool charge_sizes = true;
};

// Finds the rank-th smallest element (1-based, duplicates counted) of the
// union of K agent-held multisets. Communication pattern per iteration:
// agents send their active-window medians, the coordinator broadcasts the
// weighted median of those as a pivot, agents reply with (below, equal)
// counts, and the coordinator either finishes or discards one side by value.
// Adaptive mode gathers the remainder once the active union is at most 2K.
inline SearchOutcome collab_search(CommFabric& fabric, const std::vector<std::vector<double>>& sets,
                                   long long rank, const SearchOptions& opt = {}) {
    const int K = static_cast<int>(sets.size());
    if (K < 1) throw std::invalid_argument("collab_search: no agents");
    if (K > fabric.num_agents()) throw std::invalid_argument("collab_search: more sets than agents");

    std::vector<std::vector<double>> sorted(sets.begin(), sets.end());
    long long total = 0;
    for (auto& s : sorted) {
        std::sort(s.begin(), s.end());
        total += static_cast<long long>(s.size());
    }
    if (rank < 1 || rank > total) throw std::invalid_argument("collab_search: rank out of range");

    // Active windows [lo, hi) into each sorted multiset.
    std::vector<std::size_t> lo(sorted.size(), 0), hi(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k) hi[k] = sorted[k].size();

    const int round = fabric.round();
    const auto coord = Endpoint::coordinator();

    auto finish = [&](double value) {
        SearchOutcome out;
        out.value = value;
        out.below_by_agent.resize(sorted.size());
        out.tied_by_agent.resize(sorted.size());
        for (std::size_t k = 0; k < sorted.size(); ++k) {
            const auto& s = sorted[k];
            const auto lb = std::lower_bound(s.begin(), s.end(), value) - s.begin();
            const auto ub = std::upper_bound(s.begin(), s.end(), value) - s.begin();
            out.below_by_agent[k] = static_cast<long long>(lb);
            out.tied_by_agent[k] = static_cast<long long>(ub - lb);
            out.below += out.below_by_agent[k];
            out.tied += out.tied_by_agent[k];
        }
        return out;
    };

    long long rho = rank;  // target rank within the active union
    long long active_total = total;
    bool done = false;
    double value = 0.0;
    int iterations = 0;
    bool first_leg = true;

    for (;;) {
        if (done && (!opt.oblivious || iterations >= opt.padded_iterations)) break;

        if (!done && !opt.oblivious && active_total <= 2 * static_cast<long long>(K)) {
            // Endgame: gather the surviving elements and finish locally.
            std::vector<double> rest;
            for (std::size_t k = 0; k < sorted.size(); ++k) {
                const std::size_t w = hi[k] - lo[k];
                if (w == 0) continue;
                fabric.post(Endpoint::agent(static_cast<int>(k)), coord, w, round);
                rest.insert(rest.end(), sorted[k].begin() + static_cast<std::ptrdiff_t>(lo[k]),
                            sorted[k].begin() + static_cast<std::ptrdiff_t>(hi[k]));
            }
            std::nth_element(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(rho - 1), rest.end());
            value = rest[static_cast<std::size_t>(rho - 1)];
            done = true;
            break;
        }

        ++iterations;

        // Up: active-window medians (first adaptive leg also carries sizes).
        std::vector<double> medians(sorted.size(), 0.0);
        std::vector<bool> has_median(sorted.size(), false);
        for (std::size_t k = 0; k < sorted.size(); ++k) {
            const std::size_t w = hi[k] - lo[k];
            if (w > 0) {
                medians[k] = sorted[k][lo[k] + (w - 1) / 2];  // lower median
                has_median[k] = true;
            }
            if (opt.oblivious || w > 0) {
                const std::uint64_t words = (first_leg && opt.charge_sizes && !opt.oblivious) ? 2 : 1;
                fabric.post(Endpoint::agent(static_cast<int>(k)), coord, words, round);
            }
        }
        first_leg = false;

        if (!done) {
            // Pivot: weighted lower median of the medians by window size.
            std::vector<std::size_t> order;
            for (std::size_t k = 0; k < sorted.size(); ++k)
                if (has_median[k]) order.push_back(k);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return medians[a] < medians[b];
            });
            const long long half = (active_total + 1) / 2;
            long long cum = 0;
            double pivot = medians[order.back()];
            for (std::size_t k : order) {
                cum += static_cast<long long>(hi[k] - lo[k]);
                if (cum >= half) {
                    pivot = medians[k];
                    break;
                }
            }

            // Down: pivot; up: per-agent (below, equal) counts vs the pivot.
            long long lt_total = 0, eq_total = 0;
            std::vector<long long> lt(sorted.size(), 0), eq(sorted.size(), 0);
            for (std::size_t k = 0; k < sorted.size(); ++k) {
                const bool participates = opt.oblivious || (hi[k] - lo[k]) > 0;
                if (!participates) continue;
                fabric.post(coord, Endpoint::agent(static_cast<int>(k)), 1, round);
                const auto begin = sorted[k].begin();
                const auto lb = std::lower_bound(begin + static_cast<std::ptrdiff_t>(lo[k]),
                                                 begin + static_cast<std::ptrdiff_t>(hi[k]), pivot) -
                                begin;
                const auto ub = std::upper_bound(begin + static_cast<std::ptrdiff_t>(lo[k]),
                                                 begin + static_cast<std::ptrdiff_t>(hi[k]), pivot) -
                                begin;
                lt[k] = static_cast<long long>(lb) - static_cast<long long>(lo[k]);
                eq[k] = static_cast<long long>(ub - lb);
                lt_total += lt[k];
                eq_total += eq[k];
                fabric.post(Endpoint::agent(static_cast<int>(k)), coord, 2, round);
            }

            if (lt_total < rho && rho <= lt_total + eq_total) {
                value = pivot;
                done = true;
            } else if (rho <= lt_total) {
                // Keep the strictly-below side.
                for (std::size_t k = 0; k < sorted.size(); ++k) {
                    if (hi[k] - lo[k] == 0) continue;
                    hi[k] = lo[k] + static_cast<std::size_t>(lt[k]);
                }
                active_total = lt_total;
            } else {
                // Keep the strictly-above side.
                for (std::size_t k = 0; k < sorted.size(); ++k) {
                    if (hi[k] - lo[k] == 0) continue;
                    lo[k] += static_cast<std::size_t>(lt[k] + eq[k]);
                }
                rho -= lt_total + eq_total;
                active_total -= lt_total + eq_total;
            }
        } else {
            // Padding iteration: repeat the pivot exchange without state change.
            for (std::size_t k = 0; k < sorted.size(); ++k) {
                fabric.post(coord, Endpoint::agent(static_cast<int>(k)), 1, round);
                fabric.post(Endpoint::agent(static_cast<int>(k)), coord, 2, round);
            }
        }
    }

    return finish(value);
}

}  // namespace collabtop
