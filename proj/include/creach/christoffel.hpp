#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "creach/basis.hpp"
#include "creach/cloud.hpp"
#include "creach/errors.hpp"
#include "creach/parallel.hpp"

namespace creach {

/// Componentwise affine map taking the training cloud's bounding box onto
/// [-1,1]^n: x' = (x - offset) / scale. Purely a polynomial coordinate
/// change, so it leaves the estimator's decisions unchanged while keeping
/// high-degree moment matrices factorizable.
struct normalization_map {
    std::vector<double> offset;
    std::vector<double> scale;

    void apply(std::span<const double> x, std::span<double> out) const {
        for (std::size_t i = 0; i < offset.size(); ++i)
            out[i] = (x[i] - offset[i]) / scale[i];
    }
};

/// Bounding-box normalization of a cloud. Zero-width coordinates keep
/// scale 1 with the offset at the constant value.
inline normalization_map fit_normalization(const sample_cloud& cloud) {
    const int n = cloud.dim();
    std::vector<double> lo(n, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
    for (std::uint64_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        for (int j = 0; j < n; ++j) {
            lo[j] = std::min(lo[j], p[j]);
            hi[j] = std::max(hi[j], p[j]);
        }
    }
    normalization_map map;
    map.offset.resize(n);
    map.scale.resize(n);
    for (int j = 0; j < n; ++j) {
        const double half = (hi[j] - lo[j]) / 2.0;
        map.offset[j] = lo[j] + half;
        map.scale[j] = half > 0.0 ? half : 1.0;
    }
    return map;
}

struct fit_meta {
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;
    int order = 0;
    double jitter = 0.0;
    std::uint64_t problem_digest = 0;
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    double delta = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

/// Index into a packed row-major lower triangle.
inline std::size_t tri(std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; }

/// In-place Cholesky of a packed lower-triangular copy of a symmetric
/// matrix. Returns false on breakdown (non-positive or non-finite pivot).
inline bool cholesky_in_place(std::vector<double>& a, std::size_t m) {
    for (std::size_t j = 0; j < m; ++j) {
        double d = a[tri(j, j)];
        for (std::size_t t = 0; t < j; ++t) d -= a[tri(j, t)] * a[tri(j, t)];
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        a[tri(j, j)] = ljj;
        for (std::size_t i = j + 1; i < m; ++i) {
            double s = a[tri(i, j)];
            for (std::size_t t = 0; t < j; ++t) s -= a[tri(i, t)] * a[tri(j, t)];
            a[tri(i, j)] = s / ljj;
        }
    }
    return true;
}

/// Accumulate the packed moment matrix (1/N) sum z z^T over normalized
/// points. Points are consumed in storage order in chunks of `chunk_size`;
/// the per-chunk partial sums are then combined pairwise in index order, so
/// the result is bitwise identical no matter how many threads computed the
/// chunks.
inline std::vector<double> accumulate_moments(const sample_cloud& cloud,
                                              const monomial_basis& basis,
                                              const normalization_map& norm, int threads,
                                              std::size_t chunk_size = 4096) {
    const std::size_t m = basis.size();
    const std::size_t packed = m * (m + 1) / 2;
    const std::uint64_t n_points = cloud.size();
    const std::uint64_t n_chunks = (n_points + chunk_size - 1) / chunk_size;

    std::vector<std::vector<double>> partial(n_chunks);
    parallel_for_ranges(n_chunks, threads, [&](std::uint64_t cb, std::uint64_t ce) {
        std::vector<double> xn(basis.n());
        std::vector<double> z(m);
        for (std::uint64_t c = cb; c < ce; ++c) {
            auto& acc = partial[c];
            acc.assign(packed, 0.0);
            const std::uint64_t begin = c * chunk_size;
            const std::uint64_t end = std::min<std::uint64_t>(begin + chunk_size, n_points);
            for (std::uint64_t i = begin; i < end; ++i) {
                norm.apply(cloud.point(i), xn);
                basis.evaluate(xn, z);
                std::size_t idx = 0;
                for (std::size_t r = 0; r < m; ++r) {
                    const double zr = z[r];
                    for (std::size_t s = 0; s <= r; ++s) acc[idx++] += zr * z[s];
                }
            }
        }
    });

    // pairwise reduction in chunk-index order
    std::vector<std::vector<double>> level = std::move(partial);
    while (level.size() > 1) {
        std::vector<std::vector<double>> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
            auto& a = level[i];
            const auto& b = level[i + 1];
            for (std::size_t t = 0; t < packed; ++t) a[t] += b[t];
            next.push_back(std::move(a));
        }
        if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
        level = std::move(next);
    }

    std::vector<double> moments = level.empty() ? std::vector<double>(packed, 0.0)
                                                : std::move(level.front());
    // true division: keeps the constant-monomial entry N/N at exactly 1
    for (auto& v : moments) v /= static_cast<double>(n_points);
    return moments;
}

/// Factorize moments + jitter*I, escalating jitter from 1e-12*trace/m by
/// factors of 10 up to 1e-6*trace/m. Returns the packed factor and the
/// jitter that was applied (0 when none was needed).
inline std::pair<std::vector<double>, double> factorize_with_jitter(
    const std::vector<double>& moments, std::size_t m) {
    double trace = 0.0;
    for (std::size_t j = 0; j < m; ++j) trace += moments[tri(j, j)];
    const double unit = trace / static_cast<double>(m);

    double jitter = 0.0;
    for (;;) {
        std::vector<double> chol = moments;
        for (std::size_t j = 0; j < m; ++j) chol[tri(j, j)] += jitter;
        if (cholesky_in_place(chol, m)) return {std::move(chol), jitter};
        if (jitter == 0.0) {
            jitter = 1e-12 * unit;
        } else if (jitter < 0.99e-6 * unit) {
            jitter *= 10.0;
        } else {
            throw singular_moment(
                "fit: moment matrix is singular even at maximum jitter; the sample "
                "cloud is degenerate (all points near the zero set of one degree-k "
                "polynomial)");
        }
        if (!(jitter > 0.0) || !std::isfinite(jitter))
            throw singular_moment("fit: moment matrix has no usable scale");
    }
}

} // namespace detail

/// Fitted empirical inverse Christoffel function C(x) = z_k(x')^T Mhat^{-1}
/// z_k(x') over normalized coordinates x', together with the level alpha =
/// max_i C(x_i) over the training cloud. The sublevel set {x : C(x) <= alpha}
/// is the reachable set estimate. Immutable apart from re-leveling alpha;
/// safe for concurrent evaluation once leveled.
class christoffel_estimator {
public:
    christoffel_estimator(monomial_basis basis, normalization_map norm,
                          std::vector<double> chol_lower, double alpha, fit_meta meta)
        : basis_(std::move(basis)), norm_(std::move(norm)), chol_(std::move(chol_lower)),
          alpha_(alpha), meta_(meta) {
        if (norm_.offset.size() != static_cast<std::size_t>(basis_.n()))
            throw dimension_mismatch("christoffel_estimator: normalization dimension mismatch");
        if (chol_.size() != basis_.size() * (basis_.size() + 1) / 2)
            throw std::invalid_argument("christoffel_estimator: factor has wrong size");
    }

    const monomial_basis& basis() const { return basis_; }
    const normalization_map& normalization() const { return norm_; }
    const std::vector<double>& chol_lower() const { return chol_; }
    double alpha() const { return alpha_; }
    const fit_meta& meta() const { return meta_; }

    void set_alpha(double alpha) { alpha_ = alpha; }

    /// C(x) for a raw-coordinate point: solve L v = z_k(normalize(x)) and
    /// return v^T v. The inverse moment matrix is never formed.
    double evaluate(std::span<const double> x) const {
        if (x.size() != static_cast<std::size_t>(basis_.n()))
            throw dimension_mismatch("christoffel_estimator::evaluate: wrong dimension");
        std::vector<double> xn(basis_.n());
        std::vector<double> v(basis_.size());
        return evaluate_with_scratch(x, xn, v);
    }

    /// Same as evaluate() but with caller-owned scratch (hot loops).
    /// xn must have size n, v must have size basis().size().
    double evaluate_with_scratch(std::span<const double> x, std::span<double> xn,
                                 std::span<double> v) const {
        norm_.apply(x, xn);
        basis_.evaluate(xn, v);
        // forward substitution in place: v <- L^{-1} z
        const std::size_t m = basis_.size();
        for (std::size_t i = 0; i < m; ++i) {
            double s = v[i];
            const double* row = chol_.data() + detail::tri(i, 0);
            for (std::size_t j = 0; j < i; ++j) s -= row[j] * v[j];
            v[i] = s / row[i];
        }
        double c = 0.0;
        for (std::size_t i = 0; i < m; ++i) c += v[i] * v[i];
        return c;
    }

    /// Membership in the sublevel-set estimate: C(x) <= alpha, no slack.
    bool contains(std::span<const double> x) const { return evaluate(x) <= alpha_; }

private:
    monomial_basis basis_;
    normalization_map norm_;
    std::vector<double> chol_;
    double alpha_;
    fit_meta meta_;
};

/// Level parameter from a point set: the maximum of C over the points.
/// Re-leveling with a superset never decreases the result.
inline double level_from_points(const christoffel_estimator& est, const sample_cloud& cloud,
                                int threads = 0) {
    if (cloud.size() == 0)
        throw std::invalid_argument("level_from_points: empty point set");
    if (cloud.dim() != est.basis().n())
        throw dimension_mismatch("level_from_points: cloud dimension mismatch");

    const std::uint64_t n_points = cloud.size();
    const int t = resolve_threads(threads);
    std::vector<double> local_max(static_cast<std::size_t>(t),
                                  -std::numeric_limits<double>::infinity());
    std::atomic<int> slot{0};
    detail::parallel_for_ranges(n_points, t, [&](std::uint64_t begin, std::uint64_t end) {
        const int my_slot = slot.fetch_add(1);
        std::vector<double> xn(est.basis().n());
        std::vector<double> v(est.basis().size());
        double mx = -std::numeric_limits<double>::infinity();
        for (std::uint64_t i = begin; i < end; ++i)
            mx = std::max(mx, est.evaluate_with_scratch(cloud.point(i), xn, v));
        local_max[my_slot] = mx;
    });
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : local_max) mx = std::max(mx, v);
    return mx;
}

/// Algorithm core: normalize, accumulate the moment matrix deterministically,
/// factorize (with jitter escalation on breakdown), and set the level to the
/// training maximum of C.
inline christoffel_estimator fit(const sample_cloud& cloud, int k, int threads = 0) {
    monomial_basis basis = enumerate_basis(cloud.dim(), k);
    const std::size_t m = basis.size();
    if (cloud.size() < m)
        throw insufficient_samples("fit: need at least " + std::to_string(m) +
                                   " samples for n=" + std::to_string(cloud.dim()) +
                                   ", k=" + std::to_string(k) + "; got " +
                                   std::to_string(cloud.size()));

    normalization_map norm = fit_normalization(cloud);
    const std::vector<double> moments =
        detail::accumulate_moments(cloud, basis, norm, threads);
    auto [chol, jitter] = detail::factorize_with_jitter(moments, m);

    fit_meta meta;
    meta.sample_count = cloud.size();
    meta.seed = cloud.provenance().seed;
    meta.order = k;
    meta.jitter = jitter;
    meta.problem_digest = cloud.provenance().problem_digest;

    christoffel_estimator est(std::move(basis), std::move(norm), std::move(chol), 0.0, meta);
    est.set_alpha(level_from_points(est, cloud, threads));
    return est;
}

} // namespace creach
