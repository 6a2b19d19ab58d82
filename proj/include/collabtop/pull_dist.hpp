#pragma once

#include <stdexcept>
#include <vector>

#include "collabtop/arms.hpp"

namespace collabtop {

// Agent `agent` pulls arm `arm` for `count` times.
struct PullTask {
    ArmId arm;
    int agent;  // 0-based
    long long count;
};

struct Assignment {
    std::vector<PullTask> tasks;

    long long agent_load(int agent) const {
        long long t = 0;
        for (const auto& task : tasks)
            if (task.agent == agent) t += task.count;
        return t;
    }

    int agent_task_count(int agent) const {
        int c = 0;
        for (const auto& task : tasks)
            if (task.agent == agent) ++c;
        return c;
    }
};

// Greedy linear scan: each agent receives budget ceil(|I|*B/K) and consumes
// arms left to right. Every arm ends up with exactly B pulls, agents get at
// most floor(|I|/K)+2 tasks each.
inline Assignment balanced_pull_dist(const std::vector<ArmId>& arms, long long pulls_per_arm,
                                     int num_agents) {
    if (pulls_per_arm < 0) throw std::invalid_argument("balanced_pull_dist: negative pull count");
    if (num_agents < 1) throw std::invalid_argument("balanced_pull_dist: need at least one agent");
    Assignment out;
    if (arms.empty() || pulls_per_arm == 0) return out;

    const long long n = static_cast<long long>(arms.size());
    const long long per_agent = (n * pulls_per_arm + num_agents - 1) / num_agents;
    std::vector<long long> remaining(arms.size(), pulls_per_arm);

    std::size_t i = 0;
    for (int k = 0; k < num_agents && i < arms.size(); ++k) {
        long long budget = per_agent;
        while (i < arms.size() && budget > 0) {
            const long long t = std::min(remaining[i], budget);
            out.tasks.push_back(PullTask{arms[i], k, t});
            remaining[i] -= t;
            budget -= t;
            if (remaining[i] == 0) ++i;
        }
    }
    return out;
}

}  // namespace collabtop
