// Command-line front end: synthetic or ratings-derived instances, trial
// batches with CSV output, parameter sweeps, and self-check suites.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "collabtop/arms.hpp"
#include "collabtop/collab_iid.hpp"
#include "collabtop/collab_noniid.hpp"
#include "collabtop/collab_search.hpp"
#include "collabtop/harness.hpp"
#include "collabtop/poly_hash.hpp"
#include "collabtop/pull_dist.hpp"
#include "collabtop/ratings.hpp"

namespace {

struct CommonOpts {
    int n = 16;
    int m = 1;
    int agents = 4;
    long long horizon = 20000;
    int trials = 100;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string means_csv;
    double mu_top = 0.9;
    double spacing = 0.0;  // 0 = auto
    double noniid_spread = 0.0;
    std::string ratings;
    int min_count = 1;
    std::string out = "records.csv";
    std::string transcript;
    std::string sweep_axis;
    std::string sweep_values;
};

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string field;
    while (std::getline(ss, field, ',')) {
        if (!field.empty()) out.push_back(std::stod(field));
    }
    return out;
}

std::vector<long long> parse_longs(const std::string& csv) {
    std::vector<long long> out;
    std::stringstream ss(csv);
    std::string field;
    while (std::getline(ss, field, ',')) {
        if (!field.empty()) out.push_back(std::stoll(field));
    }
    return out;
}

collabtop::Instance make_iid_instance(const CommonOpts& opt) {
    using namespace collabtop;
    if (!opt.ratings.empty()) return ingest_ratings_iid(opt.ratings, opt.min_count).instance;
    Instance inst;
    if (!opt.means_csv.empty()) {
        inst.means = parse_doubles(opt.means_csv);
    } else {
        const double spacing =
            opt.spacing > 0.0 ? opt.spacing : (opt.n > 1 ? 0.8 / (opt.n - 1) : 0.0);
        for (int i = 0; i < opt.n; ++i) inst.means.push_back(opt.mu_top - spacing * i);
    }
    inst.validate();
    return inst;
}

collabtop::NonIIDInstance make_noniid_instance(const CommonOpts& opt) {
    using namespace collabtop;
    if (!opt.ratings.empty())
        return ingest_ratings_noniid(opt.ratings, opt.agents, opt.min_count).instance;
    const Instance base = make_iid_instance(opt);
    NonIIDInstance inst;
    inst.local_means.assign(static_cast<std::size_t>(opt.agents), base.means);
    if (opt.noniid_spread > 0.0) {
        // Even/odd agents offset by +/- spread; the global means are
        // preserved when K is even.
        for (int k = 0; k < opt.agents; ++k) {
            const double off = (k % 2 == 0 ? 1.0 : -1.0) * opt.noniid_spread;
            for (double& v : inst.local_means[static_cast<std::size_t>(k)]) {
                v += off;
                if (v < 0.0 || v > 1.0)
                    throw std::invalid_argument("noniid spread pushes a local mean outside [0,1]");
            }
        }
    }
    inst.validate();
    return inst;
}

// Flat key=value config support: file values fill in anything not set on the
// command line. '#' starts a comment.
void apply_flat_config(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto* option = cmd->get_option_no_throw("--" + key);
        if (option == nullptr || key == "config")
            throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key '" +
                                     key + "'");
        if (option->count() > 0) continue;  // command line wins
        option->add_result(value);
        option->run_callback();
    }
}

void add_common(CLI::App* cmd, CommonOpts& opt, std::string& config_path, bool with_sweep) {
    cmd->add_option("--config", config_path, "read options from a flat key=value file");
    cmd->add_option("--n", opt.n, "number of arms for synthetic instances");
    cmd->add_option("--m", opt.m, "number of arms to identify");
    cmd->add_option("--agents", opt.agents, "number of agents K");
    cmd->add_option("--horizon", opt.horizon, "per-agent time horizon T");
    cmd->add_option("--trials", opt.trials, "Monte-Carlo trials per configuration");
    cmd->add_option("--seed", opt.seed, "master seed");
    cmd->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
    cmd->add_option("--means", opt.means_csv, "explicit comma-separated arm means");
    cmd->add_option("--mu-top", opt.mu_top, "highest mean for generated instances");
    cmd->add_option("--spacing", opt.spacing, "mean spacing for generated instances");
    cmd->add_option("--noniid-spread", opt.noniid_spread,
                    "offset even/odd agents' local means by +/- this amount");
    cmd->add_option("--ratings", opt.ratings, "ratings file (user_id,item_id,rating with header)");
    cmd->add_option("--min-count", opt.min_count, "minimum ratings per item (per group for non-iid)");
    cmd->add_option("--out", opt.out, "output CSV path");
    cmd->add_option("--transcript", opt.transcript, "dump one trial's message transcript to this file");
    if (with_sweep) {
        cmd->add_option("--sweep-axis", opt.sweep_axis, "sweep axis: horizon or agents");
        cmd->add_option("--sweep-values", opt.sweep_values, "comma-separated sweep values");
    }
}

void maybe_dump_transcript(const CommonOpts& opt, const std::string& algo) {
    using namespace collabtop;
    if (opt.transcript.empty()) return;
    CommFabric fabric(opt.agents, opt.horizon);
    if (algo == "iid") {
        run_iid(make_iid_instance(opt), opt.m, opt.agents, opt.horizon, trial_seed(opt.seed, 0),
                fabric);
    } else if (algo == "noniid") {
        run_noniid(make_noniid_instance(opt), opt.m, opt.agents, opt.horizon,
                   trial_seed(opt.seed, 0), fabric);
    } else {
        uniform_baseline(make_noniid_instance(opt), opt.m, opt.agents, opt.horizon,
                         trial_seed(opt.seed, 0), fabric);
    }
    std::ofstream os(opt.transcript);
    if (!os) throw std::runtime_error("cannot open " + opt.transcript);
    fabric.dump(os);
    std::cout << "transcript written to " << opt.transcript << "\n";
}

int run_batch(const CommonOpts& opt, const std::string& algo) {
    using namespace collabtop;
    ExperimentConfig cfg;
    cfg.algorithm = algo;
    cfg.m = opt.m;
    cfg.agents = opt.agents;
    cfg.horizon = opt.horizon;
    cfg.trials = opt.trials;
    cfg.master_seed = opt.seed;
    cfg.threads = opt.threads;
    cfg.sweep_axis = opt.sweep_axis;
    if (!opt.sweep_values.empty()) cfg.sweep_values = parse_longs(opt.sweep_values);
    if (algo == "iid")
        cfg.instance = make_iid_instance(opt);
    else
        cfg.instance = make_noniid_instance(opt);

    const auto records = run_trials(cfg);
    emit_csv(records, opt.out);

    double failures = 0;
    for (const auto& rec : records) failures += rec.success == 0 ? 1 : 0;
    std::cout << records.size() << " trials, error rate "
              << failures / static_cast<double>(records.size()) << ", written to " << opt.out
              << "\n";
    maybe_dump_transcript(opt, algo);
    return 0;
}

int run_ingest(const CommonOpts& opt, const std::string& mode) {
    using namespace collabtop;
    std::ofstream os(opt.out);
    if (!os) throw std::runtime_error("cannot open " + opt.out);
    if (mode == "iid") {
        const auto res = ingest_ratings_iid(opt.ratings, opt.min_count);
        os << "arm,item_id,mean\n";
        for (std::size_t i = 0; i < res.items.size(); ++i)
            os << (i + 1) << ',' << res.items[i] << ',' << res.instance.means[i] << '\n';
        std::cout << res.items.size() << " arms written to " << opt.out << "\n";
    } else {
        const auto res = ingest_ratings_noniid(opt.ratings, opt.agents, opt.min_count);
        os << "arm,item_id,global_mean";
        for (int k = 0; k < opt.agents; ++k) os << ",local_mean_" << k;
        os << '\n';
        const auto globals = global_means(res.instance);
        for (std::size_t i = 0; i < res.items.size(); ++i) {
            os << (i + 1) << ',' << res.items[i] << ',' << globals[i];
            for (int k = 0; k < opt.agents; ++k)
                os << ',' << res.instance.local_means[static_cast<std::size_t>(k)][i];
            os << '\n';
        }
        std::cout << res.items.size() << " arms written to " << opt.out << "\n";
    }
    return 0;
}

// Oracle-equivalence self checks for the distributed primitives.
int run_verify(std::uint64_t seed, int cases) {
    using namespace collabtop;
    std::mt19937_64 rng(seed);
    bool all_ok = true;

    {
        int bad = 0;
        for (int c = 0; c < cases; ++c) {
            const int K = 2 + static_cast<int>(uniform_below(rng, 8));
            const int total = 1 + static_cast<int>(uniform_below(rng, 200));
            std::vector<double> pool;
            const bool force_dups = uniform_below(rng, 5) == 0;
            for (int i = 0; i < total; ++i) {
                double v = canonical_double(rng);
                if (force_dups && i > 0 && uniform_below(rng, 3) == 0)
                    v = pool[uniform_below(rng, static_cast<std::uint64_t>(pool.size()))];
                pool.push_back(v);
            }
            std::vector<std::vector<double>> sets(static_cast<std::size_t>(K));
            for (double v : pool) sets[uniform_below(rng, static_cast<std::uint64_t>(K))].push_back(v);
            const long long rank = 1 + static_cast<long long>(uniform_below(rng, static_cast<std::uint64_t>(total)));
            std::vector<double> sorted(pool);
            std::sort(sorted.begin(), sorted.end());
            CommFabric fabric(K, 0);
            fabric.advance_round();
            const auto got = collab_search(fabric, sets, rank);
            if (got.value != sorted[static_cast<std::size_t>(rank - 1)]) ++bad;
        }
        std::cout << "collab-search oracle equivalence: " << (bad == 0 ? "PASS" : "FAIL") << " ("
                  << cases - bad << "/" << cases << ")\n";
        all_ok = all_ok && bad == 0;
    }

    {
        int bad = 0;
        for (int c = 0; c < cases; ++c) {
            const int sz = 1 + static_cast<int>(uniform_below(rng, 100));
            const long long B = uniform_below(rng, 51);
            const int K = 1 + static_cast<int>(uniform_below(rng, 10));
            std::vector<ArmId> arms(static_cast<std::size_t>(sz));
            for (int i = 0; i < sz; ++i) arms[static_cast<std::size_t>(i)] = i + 1;
            const auto plan = balanced_pull_dist(arms, B, K);
            std::vector<long long> per_arm(static_cast<std::size_t>(sz) + 1, 0);
            for (const auto& task : plan.tasks) per_arm[static_cast<std::size_t>(task.arm)] += task.count;
            for (int i = 1; i <= sz; ++i)
                if (per_arm[static_cast<std::size_t>(i)] != B) ++bad;
            const long long cap = (static_cast<long long>(sz) * B + K - 1) / K;
            for (int k = 0; k < K; ++k) {
                if (plan.agent_load(k) > cap) ++bad;
                if (plan.agent_task_count(k) > sz / K + 2) ++bad;
            }
        }
        std::cout << "balanced-pull-dist invariants:    " << (bad == 0 ? "PASS" : "FAIL") << "\n";
        all_ok = all_ok && bad == 0;
    }

    {
        int bad = 0;
        const int n = 32, K = 4;
        for (int c = 0; c < cases / 2; ++c) {
            DisjInput in;
            in.x.assign(K, std::vector<std::uint8_t>(n));
            for (auto& row : in.x)
                for (auto& b : row) b = static_cast<std::uint8_t>(uniform_below(rng, 2));
            bool disj1 = false;
            for (int i = 0; i < n && !disj1; ++i) {
                bool all = true;
                for (int k = 0; k < K; ++k) all = all && in.x[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] == 1;
                disj1 = all;
            }
            const auto inst = disj_instance(in);
            const auto top = top_m(global_means(inst), 1);
            if ((top[0] != n + 1) != disj1) ++bad;
        }
        std::cout << "disj reduction (noiseless):       " << (bad == 0 ? "PASS" : "FAIL") << "\n";
        all_ok = all_ok && bad == 0;
    }

    std::cout << (all_ok ? "verify: all suites passed\n" : "verify: FAILURES\n");
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collabtop: collaborative top-m arm identification simulator"};
    app.require_subcommand(1);

    CommonOpts opt;
    std::string config_path;
    auto* iid = app.add_subcommand("run-iid", "run the two-phase iid algorithm");
    add_common(iid, opt, config_path, false);
    auto* noniid = app.add_subcommand("run-noniid", "run the non-iid algorithm");
    add_common(noniid, opt, config_path, false);
    auto* uniform = app.add_subcommand("run-uniform", "run the one-round uniform baseline");
    add_common(uniform, opt, config_path, false);
    auto* sweep = app.add_subcommand("sweep", "sweep the horizon or the agent count");
    add_common(sweep, opt, config_path, true);
    std::string sweep_algo = "iid";
    sweep->add_option("--algo", sweep_algo, "algorithm to sweep: iid, noniid or uniform");
    auto* ingest = app.add_subcommand("ingest", "derive arm means from a ratings file");
    std::string ingest_mode = "iid";
    add_common(ingest, opt, config_path, false);
    ingest->add_option("--mode", ingest_mode, "iid or noniid");
    auto* verify = app.add_subcommand("verify", "run the oracle-equivalence self checks");
    std::uint64_t verify_seed = 20240901;
    int verify_cases = 1000;
    verify->add_option("--seed", verify_seed, "seed for the self checks");
    verify->add_option("--cases", verify_cases, "cases per suite");

    CLI11_PARSE(app, argc, argv);

    try {
        for (CLI::App* cmd : {iid, noniid, uniform, sweep, ingest})
            if (app.got_subcommand(cmd) && !config_path.empty()) apply_flat_config(cmd, config_path);
        if (app.got_subcommand(iid)) return run_batch(opt, "iid");
        if (app.got_subcommand(noniid)) return run_batch(opt, "noniid");
        if (app.got_subcommand(uniform)) return run_batch(opt, "uniform");
        if (app.got_subcommand(sweep)) return run_batch(opt, sweep_algo);
        if (app.got_subcommand(ingest)) return run_ingest(opt, ingest_mode);
        if (app.got_subcommand(verify)) return run_verify(verify_seed, verify_cases);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
