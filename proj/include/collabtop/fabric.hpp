#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace collabtop {

// Message endpoints. Agents are 0-based internally; "environment" is the
// sink for the coordinator's final answer, which is charged like any other
// message.
struct Endpoint {
    int code;  // >= 0: agent index, -1: coordinator, -2: environment, -3: broadcast

    static Endpoint coordinator() { return {-1}; }
    static Endpoint environment() { return {-2}; }
    static Endpoint broadcast() { return {-3}; }
    static Endpoint agent(int k) { return {k}; }

    bool is_agent() const { return code >= 0; }
    bool operator==(const Endpoint& o) const { return code == o.code; }

    std::string label() const {
        if (code == -1) return "coordinator";
        if (code == -2) return "environment";
        if (code == -3) return "broadcast";
        return "agent" + std::to_string(code);
    }
};

struct MessageLog {
    int round;
    Endpoint from;
    Endpoint to;
    std::uint64_t words;  // broadcast: already multiplied by fan-out
};

// Metered record of a run: every message with its word count, plus per-agent
// pull-time accounting. A word is one numeric value or one arm index;
// envelopes (sender, receiver, round) are free.
struct Transcript {
    std::vector<MessageLog> messages;
    std::uint64_t words_total = 0;
    std::uint64_t words_up = 0;    // agent -> coordinator
    std::uint64_t words_down = 0;  // coordinator -> agent(s)/environment
    int rounds_used = 0;
    std::vector<long long> pulls_by_agent;
};

// Simulated coordinator/agent message fabric. One fabric per run; a run is
// single-threaded and deterministic given its seed.
class CommFabric {
  public:
    CommFabric(int num_agents, long long horizon)
        : num_agents_(num_agents), horizon_(horizon) {
        if (num_agents < 1) throw std::invalid_argument("fabric: need at least one agent");
        if (horizon < 0) throw std::invalid_argument("fabric: negative horizon");
        transcript_.pulls_by_agent.assign(static_cast<std::size_t>(num_agents), 0);
    }

    int num_agents() const { return num_agents_; }
    long long horizon() const { return horizon_; }
    int round() const { return round_; }

    int advance_round() {
        ++round_;
        transcript_.rounds_used = round_;
        return round_;
    }

    // Appends a message of `words` content words. Broadcast receivers are
    // charged num_agents * words.
    void post(Endpoint from, Endpoint to, std::uint64_t words, int round) {
        if (round != round_)
            throw std::runtime_error("fabric: message round " + std::to_string(round) +
                                     " does not match current round " + std::to_string(round_));
        std::uint64_t charged = words;
        if (to == Endpoint::broadcast()) charged = words * static_cast<std::uint64_t>(num_agents_);
        transcript_.messages.push_back(MessageLog{round, from, to, charged});
        transcript_.words_total += charged;
        if (from.is_agent())
            transcript_.words_up += charged;
        else
            transcript_.words_down += charged;
    }

    void record_pulls(int agent, long long count) {
        if (agent < 0 || agent >= num_agents_) throw std::invalid_argument("fabric: bad agent index");
        if (count < 0) throw std::invalid_argument("fabric: negative pull count");
        long long& total = transcript_.pulls_by_agent[static_cast<std::size_t>(agent)];
        if (total + count > horizon_)
            throw std::runtime_error("fabric: pull budget exceeded for agent " +
                                     std::to_string(agent) + " (" + std::to_string(total + count) +
                                     " > " + std::to_string(horizon_) + ")");
        total += count;
    }

    const Transcript& transcript() const { return transcript_; }
    std::uint64_t words_total() const { return transcript_.words_total; }

    long long max_pulls() const {
        long long mx = 0;
        for (long long p : transcript_.pulls_by_agent) mx = std::max(mx, p);
        return mx;
    }

    // Tab-separated debugging dump: round, sender, receiver, word_count.
    void dump(std::ostream& os) const {
        for (const auto& msg : transcript_.messages)
            os << msg.round << '\t' << msg.from.label() << '\t' << msg.to.label() << '\t'
               << msg.words << '\n';
    }

  private:
    int num_agents_;
    long long horizon_;
    int round_ = 0;
    Transcript transcript_;
};

}  // namespace collabtop
