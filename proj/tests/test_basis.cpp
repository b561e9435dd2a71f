#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "creach/basis.hpp"
#include "creach/rng.hpp"

using creach::basis_size;
using creach::enumerate_basis;
using creach::monomial_basis;

namespace {

std::set<std::vector<int>> exponent_set(const monomial_basis& basis) {
    std::set<std::vector<int>> out;
    for (const auto& mi : basis.indices())
        out.insert(std::vector<int>(mi.exponents.begin(), mi.exponents.end()));
    return out;
}

} // namespace

TEST_CASE("basis_size matches binomial(n+k, n)") {
    CHECK(basis_size(2, 10) == 66);
    CHECK(basis_size(2, 20) == 231);
    CHECK(basis_size(1, 0) == 1);
    CHECK(basis_size(5, 0) == 1);
    CHECK(basis_size(6, 4) == 210);
    CHECK(basis_size(1, 7) == 8);
    CHECK_THROWS_AS(basis_size(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(basis_size(100, 100), std::overflow_error);
}

TEST_CASE("enumerate_basis produces the complete degree-<=k monomial set") {
    const auto b22 = enumerate_basis(2, 2);
    REQUIRE(b22.size() == 6);
    const std::set<std::vector<int>> expected = {{0, 0}, {1, 0}, {0, 1},
                                                 {2, 0}, {1, 1}, {0, 2}};
    CHECK(exponent_set(b22) == expected);
    CHECK(b22.indices()[0].exponents == std::vector<std::uint8_t>{0, 0});

    const auto b13 = enumerate_basis(1, 3);
    REQUIRE(b13.size() == 4);
    for (int d = 0; d <= 3; ++d)
        CHECK(b13.indices()[d].exponents == std::vector<std::uint8_t>{static_cast<std::uint8_t>(d)});

    CHECK(enumerate_basis(6, 4).size() == 210);
    CHECK_THROWS_AS(enumerate_basis(0, 2), std::invalid_argument);
}

TEST_CASE("enumerate_basis is graded and deterministic") {
    for (int n = 1; n <= 4; ++n) {
        for (int k = 0; k <= 5; ++k) {
            const auto basis = enumerate_basis(n, k);
            CHECK(basis.size() == basis_size(n, k));
            // graded: degrees never decrease; ties strictly increasing lex
            for (std::size_t j = 1; j < basis.size(); ++j) {
                const auto& prev = basis.indices()[j - 1];
                const auto& cur = basis.indices()[j];
                const int dp = prev.degree(), dc = cur.degree();
                CHECK(dp <= dc);
                if (dp == dc) CHECK(prev.exponents < cur.exponents);
            }
            const auto again = enumerate_basis(n, k);
            CHECK(again.indices() == basis.indices());
        }
    }
}

TEST_CASE("eval_basis hand values") {
    const auto b22 = enumerate_basis(2, 2);
    const double origin[2] = {0.0, 0.0};
    const auto z0 = b22.evaluate(origin);
    CHECK(z0[0] == 1.0);
    for (std::size_t j = 1; j < z0.size(); ++j) CHECK(z0[j] == 0.0);

    // values matched to monomials through the exponent list
    const double p[2] = {2.0, 3.0};
    const auto zp = b22.evaluate(p);
    for (std::size_t j = 0; j < b22.size(); ++j) {
        const auto& e = b22.indices()[j].exponents;
        double expect = 1.0;
        for (int t = 0; t < e[0]; ++t) expect *= 2.0;
        for (int t = 0; t < e[1]; ++t) expect *= 3.0;
        CHECK(zp[j] == expect);
    }
    std::multiset<double> values(zp.begin(), zp.end());
    CHECK(values == std::multiset<double>{1.0, 2.0, 3.0, 4.0, 6.0, 9.0});

    const auto b13 = enumerate_basis(1, 3);
    const double q[1] = {-2.0};
    CHECK(b13.evaluate(q) == std::vector<double>{1.0, -2.0, 4.0, -8.0});
}

TEST_CASE("eval_basis rejects dimension mismatches") {
    const auto b22 = enumerate_basis(2, 2);
    const double bad[3] = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(b22.evaluate(std::span<const double>(bad)), creach::dimension_mismatch);
    std::vector<double> out(5);
    const double ok[2] = {1.0, 2.0};
    CHECK_THROWS_AS(b22.evaluate(ok, out), creach::dimension_mismatch);
}

TEST_CASE("constant slot is 1 for random points") {
    const auto basis = enumerate_basis(3, 4);
    creach::sample_stream stream(7, 0);
    for (int trial = 0; trial < 50; ++trial) {
        double x[3];
        for (double& v : x) v = 10.0 * (stream.next_double() - 0.5);
        CHECK(basis.evaluate(x)[0] == 1.0);
    }
}

TEST_CASE("incremental evaluation matches naive exponentiation") {
    creach::sample_stream stream(21, 0);
    for (int n = 1; n <= 4; ++n) {
        for (int k : {1, 3, 6}) {
            const auto basis = enumerate_basis(n, k);
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<double> x(n);
                for (double& v : x) v = 4.0 * (stream.next_double() - 0.5);
                const auto z = basis.evaluate(x);
                for (std::size_t j = 0; j < basis.size(); ++j) {
                    double expect = 1.0;
                    const auto& e = basis.indices()[j].exponents;
                    for (int i = 0; i < n; ++i)
                        expect *= std::pow(x[i], static_cast<double>(e[i]));
                    CHECK(z[j] == Catch::Approx(expect).epsilon(1e-13).margin(1e-300));
                }
            }
        }
    }
}

TEST_CASE("univariate exponent doubling") {
    // z(x^2)_d = z(x)_{2d} whenever 2d <= k
    const int k = 6;
    const auto basis = enumerate_basis(1, k);
    for (double x : {0.5, -1.25, 2.0}) {
        const double xs[1] = {x};
        const double xx[1] = {x * x};
        const auto zx = basis.evaluate(xs);
        const auto zxx = basis.evaluate(xx);
        for (int d = 0; 2 * d <= k; ++d)
            CHECK(zxx[d] == Catch::Approx(zx[2 * d]).epsilon(1e-12));
    }
}
