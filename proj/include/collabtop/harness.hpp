#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "collabtop/arms.hpp"
#include "collabtop/collab_iid.hpp"
#include "collabtop/collab_noniid.hpp"
#include "collabtop/rng.hpp"

namespace collabtop {

struct ExperimentConfig {
    std::string algorithm = "iid";  // iid | noniid | uniform
    int m = 1;
    int agents = 2;
    long long horizon = 10000;
    int trials = 100;
    std::uint64_t master_seed = 0;
    std::string sweep_axis;  // "", "horizon" or "agents"
    std::vector<long long> sweep_values;
    std::variant<Instance, NonIIDInstance> instance;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const {
        if (algorithm != "iid" && algorithm != "noniid" && algorithm != "uniform")
            throw std::invalid_argument("config: unknown algorithm '" + algorithm + "'");
        if (trials < 1) throw std::invalid_argument("config: need trials >= 1");
        if (!sweep_axis.empty() && sweep_axis != "horizon" && sweep_axis != "agents")
            throw std::invalid_argument("config: sweep axis must be 'horizon' or 'agents'");
        if (!sweep_axis.empty() && sweep_values.empty())
            throw std::invalid_argument("config: sweep axis set but no sweep values");
        const bool is_iid = algorithm == "iid";
        if (is_iid && !std::holds_alternative<Instance>(instance))
            throw std::invalid_argument("config: iid algorithm needs an iid instance");
        if (!is_iid && !std::holds_alternative<NonIIDInstance>(instance))
            throw std::invalid_argument("config: " + algorithm + " needs a non-iid instance");
        if (!is_iid && sweep_axis == "agents")
            throw std::invalid_argument("config: agent sweeps need per-K instances; only iid supported");
    }
};

struct TrialRecord {
    int trial;
    std::string algorithm;
    int n;
    int m;
    int agents;
    long long horizon;
    int success;
    std::uint64_t words_total;
    int rounds;
    long long max_pulls_per_agent;
};

inline std::uint64_t trial_seed(std::uint64_t master, int trial) {
    return mix_seed(master, 0x545249414Cull + static_cast<std::uint64_t>(trial));
}

namespace detail {

struct ConfigPoint {
    int agents;
    long long horizon;
};

inline std::vector<ConfigPoint> sweep_points(const ExperimentConfig& cfg) {
    std::vector<ConfigPoint> pts;
    if (cfg.sweep_axis.empty()) {
        pts.push_back({cfg.agents, cfg.horizon});
    } else if (cfg.sweep_axis == "horizon") {
        for (long long v : cfg.sweep_values) pts.push_back({cfg.agents, v});
    } else {
        for (long long v : cfg.sweep_values) pts.push_back({static_cast<int>(v), cfg.horizon});
    }
    return pts;
}

}  // namespace detail

// Runs trials * sweep-points simulations with per-trial seeds derived from
// the master seed. Trials may execute on worker threads; record content is
// position-determined, so the output does not depend on scheduling.
inline std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto points = detail::sweep_points(cfg);
    const int n = std::holds_alternative<Instance>(cfg.instance)
                      ? std::get<Instance>(cfg.instance).n()
                      : std::get<NonIIDInstance>(cfg.instance).n();

    std::vector<TrialRecord> records(points.size() * static_cast<std::size_t>(cfg.trials));
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t job = cursor.fetch_add(1);
            if (job >= records.size()) return;
            const std::size_t point_idx = job / static_cast<std::size_t>(cfg.trials);
            const int trial = static_cast<int>(job % static_cast<std::size_t>(cfg.trials));
            const auto pt = points[point_idx];
            try {
                Outcome out;
                if (cfg.algorithm == "iid") {
                    out = run_iid(std::get<Instance>(cfg.instance), cfg.m, pt.agents, pt.horizon,
                                  trial_seed(cfg.master_seed, trial));
                } else if (cfg.algorithm == "noniid") {
                    out = run_noniid(std::get<NonIIDInstance>(cfg.instance), cfg.m, pt.agents,
                                     pt.horizon, trial_seed(cfg.master_seed, trial));
                } else {
                    out = uniform_baseline(std::get<NonIIDInstance>(cfg.instance), cfg.m, pt.agents,
                                           pt.horizon, trial_seed(cfg.master_seed, trial));
                }
                records[job] = TrialRecord{trial,          cfg.algorithm,   n,
                                           cfg.m,          pt.agents,       pt.horizon,
                                           out.success ? 1 : 0, out.words_total, out.rounds_used,
                                           out.max_pulls_per_agent};
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    unsigned want = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                    : std::thread::hardware_concurrency();
    if (want == 0) want = 1;
    want = std::min<unsigned>(want, static_cast<unsigned>(records.size()));
    if (want <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(want);
        for (unsigned i = 0; i < want; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return records;
}

inline void emit_csv(const std::vector<TrialRecord>& records, std::ostream& os) {
    os << "trial,algorithm,n,m,K,T,success,words_total,rounds,max_pulls_per_agent\n";
    for (const auto& rec : records)
        os << rec.trial << ',' << rec.algorithm << ',' << rec.n << ',' << rec.m << ','
           << rec.agents << ',' << rec.horizon << ',' << rec.success << ',' << rec.words_total
           << ',' << rec.rounds << ',' << rec.max_pulls_per_agent << '\n';
}

inline void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("emit_csv: cannot open " + path);
    emit_csv(records, os);
    if (!os.good()) throw std::runtime_error("emit_csv: write failure on " + path);
}

// Parses a file produced by emit_csv; used by tests and the error-rate
// recomputation path.
inline std::vector<TrialRecord> parse_csv(std::istream& in) {
    std::vector<TrialRecord> records;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::istringstream ss(line);
        TrialRecord rec;
        std::string field;
        std::getline(ss, field, ',');
        rec.trial = std::stoi(field);
        std::getline(ss, rec.algorithm, ',');
        std::getline(ss, field, ',');
        rec.n = std::stoi(field);
        std::getline(ss, field, ',');
        rec.m = std::stoi(field);
        std::getline(ss, field, ',');
        rec.agents = std::stoi(field);
        std::getline(ss, field, ',');
        rec.horizon = std::stoll(field);
        std::getline(ss, field, ',');
        rec.success = std::stoi(field);
        std::getline(ss, field, ',');
        rec.words_total = std::stoull(field);
        std::getline(ss, field, ',');
        rec.rounds = std::stoi(field);
        std::getline(ss, field, ',');
        rec.max_pulls_per_agent = std::stoll(field);
        records.push_back(rec);
    }
    return records;
}

}  // namespace collabtop
