#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "creach/pac.hpp"

using creach::accuracy_lower_bound;
using creach::chernoff_params;
using creach::chernoff_sample_size;
using creach::pac_params;
using creach::pac_sample_size;
using creach::vc_dimension;

TEST_CASE("published sample sizes reproduce exactly") {
    CHECK(pac_sample_size({0.05, 1e-9, 2, 10}) == 156626);
    CHECK(pac_sample_size({0.05, 1e-9, 6, 4}) == 2009600);
    CHECK(pac_sample_size({0.05, 1e-9, 2, 4}) == 32292);
}

TEST_CASE("vc_dimension is the dimension of the degree-2k polynomial space") {
    CHECK(vc_dimension(2, 10) == 231);
    CHECK(vc_dimension(3, 0) == 1);
    CHECK(vc_dimension(6, 4) == 3003);
    CHECK_THROWS_AS(vc_dimension(50, 40), std::overflow_error);
}

TEST_CASE("chernoff_sample_size") {
    CHECK(chernoff_sample_size({0.01, 0.9999}) == 46052); // regression pin
    CHECK(chernoff_sample_size({0.05, 0.99}) == 922);
    CHECK(chernoff_sample_size({0.02, 0.999}) == 8635);
    // strictly more samples as the margin shrinks
    std::uint64_t prev = 0;
    for (double margin : {0.2, 0.1, 0.05, 0.02, 0.01}) {
        const std::uint64_t n = chernoff_sample_size({margin, 0.95});
        CHECK(n > prev);
        prev = n;
    }
}

TEST_CASE("pac_sample_size monotonicity") {
    const std::uint64_t base = pac_sample_size({0.1, 1e-6, 2, 3});
    CHECK(pac_sample_size({0.2, 1e-6, 2, 3}) <= base);   // easier accuracy
    CHECK(pac_sample_size({0.1, 1e-3, 2, 3}) <= base);   // easier confidence
    CHECK(pac_sample_size({0.1, 1e-6, 2, 4}) > base);    // richer class
    CHECK(pac_sample_size({0.1, 1e-6, 3, 3}) > base);
}

TEST_CASE("pac_sample_size floor") {
    for (double eps : {0.01, 0.1, 0.5, 0.9}) {
        for (double delta : {1e-12, 1e-6, 0.2}) {
            const auto n = pac_sample_size({eps, delta, 1, 0});
            CHECK(n >= 1);
            CHECK(static_cast<double>(n) * eps / 5.0 >= std::log(4.0 / delta) - 1e-9);
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(pac_sample_size({1.5, 1e-9, 2, 4}), std::invalid_argument);
    CHECK_THROWS_AS(pac_sample_size({0.05, 0.0, 2, 4}), std::invalid_argument);
    CHECK_THROWS_AS(pac_sample_size({0.05, 1e-9, 0, 4}), std::invalid_argument);
    CHECK_THROWS_AS(pac_sample_size({0.05, 1e-9, 2, -1}), std::invalid_argument);
    CHECK_THROWS_AS(chernoff_sample_size({0.0, 0.99}), std::invalid_argument);
    CHECK_THROWS_AS(chernoff_sample_size({0.05, 1.0}), std::invalid_argument);
}

TEST_CASE("accuracy_lower_bound clamps into [0,1]") {
    CHECK(accuracy_lower_bound(1.0 - 2e-5, chernoff_params{0.01, 0.9999}) ==
          Catch::Approx(0.98998).margin(1e-12));
    CHECK(accuracy_lower_bound(1.0, chernoff_params{0.01, 0.9999}) == 0.99);
    CHECK(accuracy_lower_bound(0.5, chernoff_params{0.6, 0.99}) == 0.0);
}
