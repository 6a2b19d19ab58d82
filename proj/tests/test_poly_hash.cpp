#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "collabtop/poly_hash.hpp"

using namespace collabtop;

TEST_CASE("sampling is deterministic under the seed") {
    std::mt19937_64 a(42), b(42);
    const auto ha = sample_hash(32, 4, a);
    const auto hb = sample_hash(32, 4, b);
    REQUIRE(ha.coefficients == hb.coefficients);
}

TEST_CASE("degree follows ceil(10 ln n)") {
    std::mt19937_64 rng(1);
    const auto h = sample_hash(8, 2, rng);
    REQUIRE(h.coefficients.size() == 22);  // degree ceil(10 ln 8) = 21
    REQUIRE(h.word_count() == 22);
}

TEST_CASE("a single agent receives everything") {
    std::mt19937_64 rng(2);
    const auto h = sample_hash(16, 1, rng);
    for (ArmId i = 1; i <= 16; ++i) REQUIRE(h.eval(i) == 0);
}

TEST_CASE("horner evaluation in a small field") {
    PolyHash h;
    h.prime = 11;
    h.num_agents = 2;
    h.coefficients = {3, 2};  // 2x + 3
    REQUIRE(h.eval(4) == 0);  // (11 mod 11) mod 2
    REQUIRE(h.eval(1) == 1);  // (5 mod 11) mod 2

    PolyHash zero;
    zero.prime = 11;
    zero.num_agents = 3;
    zero.coefficients = {0, 0, 0};
    for (ArmId i = 1; i <= 10; ++i) REQUIRE(zero.eval(i) == 0);
}

TEST_CASE("evaluation stays in range and is stable") {
    std::mt19937_64 rng(3);
    const auto h = sample_hash(64, 5, rng);
    for (ArmId i = 1; i <= 64; ++i) {
        const int k = h.eval(i);
        REQUIRE(k >= 0);
        REQUIRE(k < 5);
        REQUIRE(h.eval(i) == k);
    }
}

TEST_CASE("balance predicate") {
    REQUIRE(is_balanced({4, 4}));
    REQUIRE_FALSE(is_balanced({5, 2}));
    REQUIRE(is_balanced({3, 6}));  // inclusive boundary
    REQUIRE(is_balanced({0, 0}));
    REQUIRE_FALSE(is_balanced({0, 1}));
    REQUIRE_THROWS_AS(is_balanced({}), std::invalid_argument);
}

TEST_CASE("large partitions are balanced for almost every seed") {
    // Scaled-down version of the statistical balancedness check: n = 4096,
    // K = 2, the n_0 >= 100 K log2(n) regime.
    const int n = 4096, K = 2;
    int balanced = 0;
    const int seeds = 200;
    for (int seed = 0; seed < seeds; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed) + 1);
        const auto h = sample_hash(n, K, rng);
        std::vector<long long> sizes(static_cast<std::size_t>(K), 0);
        for (ArmId i = 1; i <= n; ++i) ++sizes[static_cast<std::size_t>(h.eval(i))];
        if (is_balanced(sizes)) ++balanced;
    }
    REQUIRE(balanced >= seeds - 1);
}
