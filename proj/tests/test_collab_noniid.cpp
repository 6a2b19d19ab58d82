#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "collabtop/collab_iid.hpp"
#include "collabtop/collab_noniid.hpp"

using namespace collabtop;

namespace {

NonIIDInstance spread_instance(const std::vector<double>& globals, int K, double spread) {
    NonIIDInstance inst;
    inst.local_means.assign(static_cast<std::size_t>(K), globals);
    for (int k = 0; k < K; ++k) {
        const double off = (k % 2 == 0 ? 1.0 : -1.0) * spread;
        for (double& v : inst.local_means[static_cast<std::size_t>(k)]) v += off;
    }
    return inst;
}

bool disj_brute(const DisjInput& in) {
    for (int i = 0; i < in.n(); ++i) {
        bool all = true;
        for (int k = 0; k < in.agents(); ++k)
            all = all && in.x[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] == 1;
        if (all) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("heterogeneous locals with known global ranking") {
    const auto inst = spread_instance({0.9, 0.6, 0.3, 0.1}, 2, 0.08);
    const auto globals = global_means(inst);
    REQUIRE(globals[0] == Catch::Approx(0.9));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto out = run_noniid(inst, 1, 2, 30000, seed);
        REQUIRE(out.selected == std::vector<ArmId>{1});
        REQUIRE(out.success);
    }
}

TEST_CASE("identical locals track the iid algorithm at half the horizon") {
    // The non-iid schedule gives each arm floor(T K 2^r / (2nR)) cumulative
    // samples, the iid one floor(T K 2^r / (4nR)); running the iid algorithm
    // with 2T aligns the per-arm sample counts, so success rates should agree
    // up to Monte-Carlo noise.
    std::vector<double> globals = {0.62, 0.5, 0.41, 0.33};
    NonIIDInstance noniid;
    noniid.local_means.assign(3, globals);
    Instance iid;
    iid.means = globals;

    const int trials = 200;
    const long long T = 120;  // success rate ~0.95: informative but stable
    int s_noniid = 0, s_iid = 0;
    for (int t = 0; t < trials; ++t) {
        s_noniid += run_noniid(noniid, 1, 3, T, static_cast<std::uint64_t>(t)).success ? 1 : 0;
        s_iid += run_iid(iid, 1, 3, 2 * T, static_cast<std::uint64_t>(t) + 9000).success ? 1 : 0;
    }
    const double ra = static_cast<double>(s_noniid) / trials;
    const double rb = static_cast<double>(s_iid) / trials;
    REQUIRE(std::abs(ra - rb) <= 0.15);
}

TEST_CASE("non-iid message schedule is data oblivious") {
    const auto inst = spread_instance({0.8, 0.6, 0.4, 0.2, 0.15, 0.1, 0.05, 0.02}, 4, 0.02);
    const auto a = run_noniid(inst, 2, 4, 5000, 1);
    const auto b = run_noniid(inst, 2, 4, 5000, 999);
    REQUIRE(a.words_total == b.words_total);

    // Expected word count: per round K*n_r local means up and K*n_{r+1}
    // survivor ids down, plus the m answer words.
    const auto s = round_schedule(8, 5000, 4, Variant::noniid);
    std::uint64_t expect = 0;
    for (int r = 0; r < s.rounds; ++r)
        expect += 4u * static_cast<std::uint64_t>(s.arms_left[static_cast<std::size_t>(r)] +
                                                  s.arms_left[static_cast<std::size_t>(r) + 1]);
    expect += 2;
    REQUIRE(a.words_total == expect);
}

TEST_CASE("non-iid round invariants") {
    const auto inst = spread_instance({0.9, 0.7, 0.5, 0.3, 0.25, 0.2, 0.15, 0.1}, 2, 0.05);
    const auto s = round_schedule(8, 4000, 2, Variant::noniid);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto out = run_noniid(inst, 2, 2, 4000, seed);
        REQUIRE(out.selected.size() == 2);
        REQUIRE(out.rounds_used <= s.rounds + 1);
        REQUIRE(out.max_pulls_per_agent <= 4000);
        for (const auto& st : out.round_trace) {
            REQUIRE(st.survivors == s.arms_left[static_cast<std::size_t>(st.r) + 1]);
            REQUIRE(st.accepted_total + st.m_remaining == 2);
        }
    }
}

TEST_CASE("every agent accumulates exactly ceil(T_{r+1}/K) local pulls per arm") {
    // All agents pull all survivors, so the per-agent total is the same
    // everywhere and determined by the schedule alone.
    const auto inst = spread_instance({0.9, 0.7, 0.5, 0.3, 0.25, 0.2, 0.15, 0.1}, 2, 0.05);
    for (long long T : {0LL, 37LL, 911LL, 5000LL}) {
        const auto s = round_schedule(8, T, 2, Variant::noniid);
        long long expect = 0;
        for (int r = 0; r < s.rounds; ++r) {
            const long long cum = (s.pull_budget[static_cast<std::size_t>(r) + 1] + 1) / 2;
            const long long prev = (s.pull_budget[static_cast<std::size_t>(r)] + 1) / 2;
            expect += s.arms_left[static_cast<std::size_t>(r)] * (cum - prev);
        }
        CommFabric fabric(2, T);
        run_noniid(inst, 2, 2, T, 5, fabric);
        REQUIRE(fabric.max_pulls() == expect);
        REQUIRE(fabric.transcript().pulls_by_agent[0] == fabric.transcript().pulls_by_agent[1]);
    }
}

TEST_CASE("uniform baseline meters exactly K*n mean words") {
    for (int K : {1, 3, 5}) {
        for (int n : {4, 10}) {
            std::vector<double> globals;
            for (int i = 0; i < n; ++i) globals.push_back(0.9 - 0.8 * i / n);
            NonIIDInstance inst;
            inst.local_means.assign(static_cast<std::size_t>(K), globals);
            const int m = 2;
            const auto out = uniform_baseline(inst, m, K, 50 * n, 3);
            REQUIRE(out.words_total == static_cast<std::uint64_t>(K * n + m));
            REQUIRE(out.rounds_used == 1);
        }
    }
}

TEST_CASE("uniform baseline succeeds with the fitted horizon constant") {
    // T = c n log(Kn) / (K Delta_min^2) with c frozen at 16.
    std::vector<double> globals = {0.7, 0.5, 0.4, 0.3};
    const int K = 2, n = 4;
    NonIIDInstance inst;
    inst.local_means.assign(K, globals);
    const double delta_min = 0.2;
    const long long T = static_cast<long long>(
        std::ceil(16.0 * n * std::log(static_cast<double>(K) * n) / (K * delta_min * delta_min)));
    int successes = 0;
    for (int t = 0; t < 200; ++t)
        successes += uniform_baseline(inst, 1, K, T, static_cast<std::uint64_t>(t)).success ? 1 : 0;
    REQUIRE(successes >= 190);
}

TEST_CASE("uniform baseline requires T >= n") {
    NonIIDInstance inst;
    inst.local_means = {{0.5, 0.4, 0.3}};
    REQUIRE_THROWS_AS(uniform_baseline(inst, 1, 1, 2, 1), std::invalid_argument);
}

TEST_CASE("disj instance separates exactly at the all-ones columns") {
    const int n = 16, K = 2;

    DisjInput zeros;
    zeros.x.assign(K, std::vector<std::uint8_t>(n, 0));
    REQUIRE(top_m(global_means(disj_instance(zeros)), 1) == std::vector<ArmId>{n + 1});

    DisjInput hit;  // agent 0 holds e_3, agent 1 all ones
    hit.x.assign(K, std::vector<std::uint8_t>(n, 1));
    hit.x[0].assign(n, 0);
    hit.x[0][2] = 1;
    const auto inst = disj_instance(hit);
    const auto globals = global_means(inst);
    REQUIRE(globals[2] == Catch::Approx(2.0 / 3.0 + 3.0 / 256.0));
    REQUIRE(top_m(globals, 1) == std::vector<ArmId>{3});

    DisjInput miss;  // no all-ones column
    miss.x.assign(K, std::vector<std::uint8_t>(n, 1));
    miss.x[0].assign(n, 0);
    const auto globals2 = global_means(disj_instance(miss));
    for (int i = 0; i < n; ++i) REQUIRE(globals2[static_cast<std::size_t>(i)] <= 0.5625 + 1e-12);
    REQUIRE(globals2[static_cast<std::size_t>(n)] == Catch::Approx(2.0 / 3.0 - 1.0 / 12.0));
    REQUIRE(top_m(globals2, 1) == std::vector<ArmId>{n + 1});
}

TEST_CASE("disj instance rejects insufficient separation") {
    DisjInput in;
    in.x.assign(3, std::vector<std::uint8_t>(18, 0));  // n = 18 <= 6K
    REQUIRE_THROWS_AS(disj_instance(in), std::invalid_argument);
}

TEST_CASE("noiseless disj equivalence over random inputs") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        DisjInput in;
        in.x.assign(4, std::vector<std::uint8_t>(32));
        for (auto& row : in.x)
            for (auto& b : row) b = static_cast<std::uint8_t>(rng() & 1);
        const auto top = top_m(global_means(disj_instance(in)), 1);
        REQUIRE((top[0] != 33) == disj_brute(in));
    }
}
