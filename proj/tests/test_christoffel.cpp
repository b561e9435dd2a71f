#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "creach/christoffel.hpp"
#include "creach/rng.hpp"
#include "oracles.hpp"

using creach::christoffel_estimator;
using creach::fit;
using creach::level_from_points;
using creach::sample_cloud;

namespace {

sample_cloud cloud_from_rows(const std::vector<std::vector<double>>& rows) {
    sample_cloud cloud(static_cast<int>(rows[0].size()), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy(rows[i].begin(), rows[i].end(), cloud.point(i).begin());
    return cloud;
}

} // namespace

TEST_CASE("k=0 fit is the constant estimator") {
    const auto cloud = oracle::synthetic_cloud(3, 20, 99);
    const auto est = fit(cloud, 0);
    CHECK(est.basis().size() == 1);
    CHECK(est.alpha() == Catch::Approx(1.0).epsilon(1e-12));
    const double probe[3] = {12.0, -5.0, 0.25};
    CHECK(est.evaluate(probe) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(est.contains(probe));
}

TEST_CASE("two-point univariate fit by hand") {
    const auto cloud = cloud_from_rows({{-1.0}, {1.0}});
    const auto est = fit(cloud, 1);
    // normalized cloud is {-1, +1}: moment matrix is the identity and
    // C(x) = 1 + x'^2
    CHECK(est.alpha() == Catch::Approx(2.0).epsilon(1e-12));
    const double zero[1] = {0.0};
    const double two[1] = {2.0};
    const double three[1] = {3.0};
    CHECK(est.evaluate(zero) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(est.evaluate(two) == Catch::Approx(5.0).epsilon(1e-12));
    CHECK(est.contains(std::span<const double>(cloud.point(0))));
    CHECK(est.contains(std::span<const double>(cloud.point(1))));
    CHECK_FALSE(est.contains(three)); // C(3) = 10 > 2
}

TEST_CASE("trace identity and explicit-inverse agreement") {
    const auto cloud = oracle::synthetic_cloud(2, 500, 2024, -1.5, 2.5);
    const auto est = fit(cloud, 3);
    REQUIRE(est.meta().jitter == 0.0);

    const oracle::direct_evaluator direct(est, cloud);
    double mean = 0.0;
    for (std::uint64_t i = 0; i < cloud.size(); ++i) {
        const double via_solve = est.evaluate(cloud.point(i));
        const double via_inverse = direct(cloud.point(i));
        CHECK(via_solve == Catch::Approx(via_inverse).epsilon(1e-8));
        mean += via_solve;
    }
    mean /= static_cast<double>(cloud.size());
    // (1/N) sum C(x_i) = trace(Mhat^{-1} Mhat) = m = binomial(5,2) = 10
    CHECK(mean == Catch::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("insufficient samples are rejected") {
    const auto cloud = oracle::synthetic_cloud(2, 5, 7); // m = 6 for k = 2
    CHECK_THROWS_AS(fit(cloud, 2), creach::insufficient_samples);
}

TEST_CASE("duplicate-point cloud engages the jitter path") {
    // 10 copies of one point: rank-1 moment matrix, factorizable only with
    // jitter
    std::vector<std::vector<double>> rows(10, {0.7, -0.2});
    const auto cloud = cloud_from_rows(rows);
    const auto est = fit(cloud, 1);
    CHECK(est.meta().jitter > 0.0);
    for (std::uint64_t i = 0; i < cloud.size(); ++i)
        CHECK(est.evaluate(cloud.point(i)) <= est.alpha() * (1.0 + 1e-9));
}

TEST_CASE("indefinite matrix exhausts jitter") {
    // fabricated indefinite "moment matrix": -1 on one diagonal entry can
    // never be rescued by the capped jitter
    std::vector<double> packed = {1.0, 0.0, -1.0};
    CHECK_THROWS_AS(creach::detail::factorize_with_jitter(packed, 2),
                    creach::singular_moment);
}

TEST_CASE("training containment, positivity and level lower bound") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const int n = 1 + static_cast<int>(seed % 3);
        const int k = 2 + static_cast<int>(seed % 2);
        const auto cloud = oracle::synthetic_cloud(n, 400, seed, -2.0, 1.0);
        const auto est = fit(cloud, k);
        const double m = static_cast<double>(est.basis().size());
        CHECK(est.alpha() >= m * (1.0 - 1e-6));
        for (std::uint64_t i = 0; i < cloud.size(); ++i)
            CHECK(est.evaluate(cloud.point(i)) <= est.alpha() * (1.0 + 1e-9));
        creach::sample_stream probes(seed ^ 0xabcdef, 0);
        for (int t = 0; t < 100; ++t) {
            std::vector<double> x(n);
            for (double& v : x) v = 8.0 * (probes.next_double() - 0.5);
            CHECK(est.evaluate(x) > 0.0);
        }
    }
}

TEST_CASE("moment matrix keeps the constant entry at exactly one") {
    // N = 49 is one of the counts where N * (1/N) != 1 in double arithmetic
    for (std::uint64_t n_points : {3ull, 49ull, 103ull, 500ull}) {
        const auto cloud = oracle::synthetic_cloud(2, n_points, n_points);
        const auto basis = creach::enumerate_basis(2, 2);
        const auto norm = creach::fit_normalization(cloud);
        const auto moments = creach::detail::accumulate_moments(cloud, basis, norm, 1);
        CHECK(moments[creach::detail::tri(0, 0)] == 1.0);
    }
}

TEST_CASE("factorization reproduces the moment matrix") {
    const auto cloud = oracle::synthetic_cloud(2, 300, 5, 0.0, 4.0);
    const auto est = fit(cloud, 4);
    const auto mat = oracle::naive_moment_matrix(cloud, est.basis(), est.normalization());
    const std::size_t m = est.basis().size();
    double trace = 0.0;
    for (std::size_t j = 0; j < m; ++j) trace += mat[j][j];

    // || L L^T - (Mhat + jitter I) ||_max <= 1e-10 * trace / m
    const auto& chol = est.chol_lower();
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double v = 0.0;
            for (std::size_t t = 0; t <= j; ++t)
                v += chol[creach::detail::tri(i, t)] * chol[creach::detail::tri(j, t)];
            double target = mat[i][j];
            if (i == j) target += est.meta().jitter;
            worst = std::max(worst, std::abs(v - target));
        }
    }
    CHECK(worst <= 1e-10 * trace / static_cast<double>(m));
}

TEST_CASE("sample order invariance") {
    const auto cloud = oracle::synthetic_cloud(2, 1000, 77, -1.0, 3.0);
    std::vector<std::uint64_t> order(cloud.size());
    std::iota(order.begin(), order.end(), 0);
    // deterministic shuffle
    creach::sample_stream stream(123, 0);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1],
                  order[static_cast<std::size_t>(stream.next_double() * i)]);
    sample_cloud permuted(cloud.dim(), cloud.size(), cloud.provenance());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto src = cloud.point(order[i]);
        std::copy(src.begin(), src.end(), permuted.point(i).begin());
    }

    const auto est_a = fit(cloud, 3);
    const auto est_b = fit(permuted, 3);
    CHECK(est_a.alpha() == Catch::Approx(est_b.alpha()).epsilon(1e-9));
    creach::sample_stream probes(55, 0);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(2);
        for (double& v : x) v = -2.0 + 6.0 * probes.next_double();
        CHECK(est_a.evaluate(x) == Catch::Approx(est_b.evaluate(x)).epsilon(1e-9));
        CHECK(est_a.contains(x) == est_b.contains(x));
    }
}

TEST_CASE("affine invariance of decisions") {
    const auto cloud = oracle::synthetic_cloud(2, 400, 31, -1.0, 1.0);

    const double a[2][2] = {{1.3, 0.6}, {0.8, 1.7}}; // entries within [0.5, 2]
    const double b[2] = {0.4, -1.1};
    sample_cloud mapped(2, cloud.size(), cloud.provenance());
    for (std::uint64_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        auto q = mapped.point(i);
        q[0] = a[0][0] * p[0] + a[0][1] * p[1] + b[0];
        q[1] = a[1][0] * p[0] + a[1][1] * p[1] + b[1];
    }

    const auto est = fit(cloud, 3);
    const auto est_mapped = fit(mapped, 3);
    CHECK(est.alpha() == Catch::Approx(est_mapped.alpha()).epsilon(1e-6));

    creach::sample_stream probes(101, 0);
    for (int t = 0; t < 1000; ++t) {
        const double x0 = -1.4 + 2.8 * probes.next_double();
        const double x1 = -1.4 + 2.8 * probes.next_double();
        const double x[2] = {x0, x1};
        const double y[2] = {a[0][0] * x0 + a[0][1] * x1 + b[0],
                             a[1][0] * x0 + a[1][1] * x1 + b[1]};
        const double cx = est.evaluate(x);
        const double cy = est_mapped.evaluate(y);
        CHECK(cx == Catch::Approx(cy).epsilon(1e-6));
        CHECK(est.contains(x) == est_mapped.contains(y));
    }
}

TEST_CASE("level_from_points") {
    const auto cloud = cloud_from_rows({{-1.0}, {1.0}});
    const auto est = fit(cloud, 1);
    CHECK(level_from_points(est, cloud) == Catch::Approx(2.0).epsilon(1e-12));

    // superset never decreases the level
    const auto superset = cloud_from_rows({{-1.0}, {1.0}, {1.8}, {0.3}});
    CHECK(level_from_points(est, superset) >= est.alpha());

    const sample_cloud empty_like(1, 0);
    CHECK_THROWS_AS(level_from_points(est, empty_like), std::invalid_argument);
    const auto wrong_dim = oracle::synthetic_cloud(2, 4, 3);
    CHECK_THROWS_AS(level_from_points(est, wrong_dim), creach::dimension_mismatch);
}

TEST_CASE("parallel fit is bitwise deterministic") {
    const auto cloud = oracle::synthetic_cloud(3, 9000, 404, -1.0, 2.0);
    const auto serial = fit(cloud, 3, 1);
    const auto parallel = fit(cloud, 3, 4);
    CHECK(serial.alpha() == parallel.alpha());
    CHECK(serial.chol_lower() == parallel.chol_lower());
    CHECK(serial.normalization().offset == parallel.normalization().offset);
    CHECK(serial.normalization().scale == parallel.normalization().scale);
}

TEST_CASE("degenerate coordinate gets unit scale") {
    // second coordinate constant: zero-width bounding box
    const auto cloud = cloud_from_rows({{-1.0, 5.0}, {0.2, 5.0}, {1.0, 5.0}, {0.6, 5.0}});
    const auto est = fit(cloud, 1);
    CHECK(est.normalization().scale[1] == 1.0);
    CHECK(est.normalization().offset[1] == 5.0);
    for (std::uint64_t i = 0; i < cloud.size(); ++i)
        CHECK(est.evaluate(cloud.point(i)) <= est.alpha() * (1.0 + 1e-9));
}

TEST_CASE("evaluate rejects dimension mismatches") {
    const auto cloud = oracle::synthetic_cloud(2, 50, 8);
    const auto est = fit(cloud, 2);
    const double bad[3] = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(est.evaluate(std::span<const double>(bad)), creach::dimension_mismatch);
}
