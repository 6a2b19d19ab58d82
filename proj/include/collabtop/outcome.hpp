#pragma once

#include <cstdint>
#include <vector>

#include "collabtop/arms.hpp"

namespace collabtop {

// Per-elimination-round counters, recorded for invariant checks.
struct RoundStat {
    int r = 0;
    bool local_phase = false;
    long long survivors = 0;       // |I_{r+1}|
    long long accepted_total = 0;  // |Q_{r+1}|
    int m_remaining = 0;           // m_{r+1}
    std::uint64_t round_words = 0;
};

struct Outcome {
    std::vector<ArmId> selected;  // sorted, |selected| == m on a completed run
    bool success = false;         // exact set equality with the oracle top-m
    std::uint64_t words_total = 0;
    int rounds_used = 0;
    long long max_pulls_per_agent = 0;
    std::vector<RoundStat> round_trace;
};

}  // namespace collabtop
