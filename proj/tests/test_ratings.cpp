#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "collabtop/ratings.hpp"

using namespace collabtop;

TEST_CASE("iid ingest averages and rescales") {
    std::istringstream in("user_id,item_id,rating\n1,7,5.0\n2,7,3.0\n");
    const auto res = ingest_ratings_iid(in, 2);
    REQUIRE(res.items == std::vector<long long>{7});
    REQUIRE(res.instance.means[0] == Catch::Approx(0.8));
}

TEST_CASE("iid ingest errors when the filter removes everything") {
    std::istringstream in("user_id,item_id,rating\n1,7,5.0\n");
    REQUIRE_THROWS_AS(ingest_ratings_iid(in, 2), std::invalid_argument);
}

TEST_CASE("non-iid ingest groups users by id modulo K") {
    std::istringstream in("user_id,item_id,rating\n1,7,4.0\n2,7,2.0\n");
    const auto res = ingest_ratings_noniid(in, 2, 1);
    REQUIRE(res.items == std::vector<long long>{7});
    // user 2 -> group 0, user 1 -> group 1
    REQUIRE(res.instance.local_means[0][0] == Catch::Approx(0.4));
    REQUIRE(res.instance.local_means[1][0] == Catch::Approx(0.8));
    REQUIRE(global_means(res.instance)[0] == Catch::Approx(0.6));
}

TEST_CASE("non-iid ingest requires min_count in every group") {
    std::istringstream in(
        "user_id,item_id,rating\n"
        "1,7,4.0\n2,7,2.0\n4,7,3.0\n"  // item 7: group0 x2, group1 x1
        "1,9,5.0\n3,9,4.0\n2,9,1.0\n4,9,2.0\n");
    const auto res = ingest_ratings_noniid(in, 2, 2);
    REQUIRE(res.items == std::vector<long long>{9});
    REQUIRE(res.instance.local_means[0][0] == Catch::Approx((1.0 + 2.0) / 2.0 / 5.0));
    REQUIRE(res.instance.local_means[1][0] == Catch::Approx((5.0 + 4.0) / 2.0 / 5.0));
}

TEST_CASE("malformed rows are reported with their line number") {
    std::istringstream in("user_id,item_id,rating\n1,7,5.0\nbogus\n");
    try {
        ingest_ratings_iid(in, 1);
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& err) {
        REQUIRE(std::string(err.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("ratings outside [0,5] are rejected") {
    std::istringstream in("user_id,item_id,rating\n1,7,5.5\n");
    REQUIRE_THROWS_AS(ingest_ratings_iid(in, 1), std::invalid_argument);
}

TEST_CASE("arms are ordered by item id") {
    std::istringstream in("user_id,item_id,rating\n1,9,1.0\n1,3,2.0\n1,5,3.0\n");
    const auto res = ingest_ratings_iid(in, 1);
    REQUIRE(res.items == std::vector<long long>{3, 5, 9});
    REQUIRE(res.instance.means[0] == Catch::Approx(0.4));
    REQUIRE(res.instance.means[2] == Catch::Approx(0.2));
}
