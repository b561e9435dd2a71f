#pragma once

#include <atomic>
#include <charconv>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "creach/cloud.hpp"
#include "creach/errors.hpp"
#include "creach/parallel.hpp"
#include "creach/rng.hpp"
#include "creach/systems.hpp"

namespace creach {

/// Axis-aligned box, lower <= upper componentwise.
struct box {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const { return lower.size(); }

    void check(const char* what) const {
        if (lower.size() != upper.size())
            throw dimension_mismatch(std::string(what) + ": bound dimensions disagree");
        for (std::size_t i = 0; i < lower.size(); ++i)
            if (!(lower[i] <= upper[i]))
                throw std::invalid_argument(std::string(what) +
                                            ": lower bound exceeds upper bound");
    }
};

/// Everything that determines the sampled quantity Phi(t1; t0, X0, D):
/// system, integration scheme, time range, the initial and disturbance
/// intervals, and the optional projection onto a subset of state variables
/// (0-based internally; external documents use 1-based indices).
struct reachability_problem {
    system_spec system;
    integrator_config integ;
    double t0 = 0.0;
    double t1 = 0.0;
    box x0;
    std::optional<box> disturbance; // absent when the system has none
    std::vector<int> projection;    // empty means identity

    int effective_dim() const {
        return projection.empty() ? system.state_dim : static_cast<int>(projection.size());
    }

    void check() const {
        if (!(t1 >= t0)) throw std::invalid_argument("problem: t1 must be >= t0");
        if (!(integ.step > 0.0)) throw std::invalid_argument("problem: step must be > 0");
        x0.check("initial set");
        if (x0.dim() != static_cast<std::size_t>(system.state_dim))
            throw dimension_mismatch("initial set dimension does not match the system");
        if (system.disturbance_dim > 0) {
            if (!disturbance)
                throw std::invalid_argument("problem: system needs a disturbance interval");
            disturbance->check("disturbance set");
            if (disturbance->dim() != static_cast<std::size_t>(system.disturbance_dim))
                throw dimension_mismatch("disturbance dimension does not match the system");
        } else if (disturbance) {
            throw std::invalid_argument("problem: system takes no disturbance");
        }
        std::vector<bool> seen(system.state_dim, false);
        for (int idx : projection) {
            if (idx < 0 || idx >= system.state_dim)
                throw std::invalid_argument("projection: index out of range");
            if (seen[idx]) throw std::invalid_argument("projection: duplicate index");
            seen[idx] = true;
        }
    }
};

namespace detail {

inline void digest_mix(std::uint64_t& h, std::string_view bytes) {
    // FNV-1a
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
}

inline void digest_mix(std::uint64_t& h, double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    digest_mix(h, std::string_view(buf, r.ptr - buf));
    digest_mix(h, ";");
}

} // namespace detail

/// Stable 64-bit digest of the problem definition, recorded in cloud and
/// estimator provenance so mismatched artifacts are detectable.
inline std::uint64_t problem_digest(const reachability_problem& p) {
    std::uint64_t h = 14695981039346656037ull;
    detail::digest_mix(h, to_string(p.system.id));
    detail::digest_mix(h, "|");
    for (const auto& [name, value] : p.system.parameters) {
        detail::digest_mix(h, name);
        detail::digest_mix(h, value);
    }
    detail::digest_mix(h, p.integ.step);
    detail::digest_mix(h, p.t0);
    detail::digest_mix(h, p.t1);
    for (double v : p.x0.lower) detail::digest_mix(h, v);
    for (double v : p.x0.upper) detail::digest_mix(h, v);
    if (p.disturbance) {
        for (double v : p.disturbance->lower) detail::digest_mix(h, v);
        for (double v : p.disturbance->upper) detail::digest_mix(h, v);
    }
    for (int idx : p.projection) detail::digest_mix(h, static_cast<double>(idx));
    return h;
}

/// One draw from the componentwise-uniform distribution on the box. A
/// zero-width component always returns its constant value.
inline void draw_uniform(const box& interval, sample_stream& stream, std::span<double> out) {
    for (std::size_t i = 0; i < interval.lower.size(); ++i) {
        const double u = stream.next_double();
        out[i] = interval.lower[i] + u * (interval.upper[i] - interval.lower[i]);
    }
}

inline std::vector<double> draw_uniform(const box& interval, sample_stream& stream) {
    std::vector<double> out(interval.dim());
    draw_uniform(interval, stream, out);
    return out;
}

/// Algorithm main loop: for each index i, draw (x0, d) from the per-index
/// stream derived from (seed, i), simulate to t1 and store the (projected)
/// final state at slot i. Bitwise identical for fixed (problem, N, seed)
/// regardless of thread count, and the first M points of an N-run equal an
/// M-run's points.
inline sample_cloud generate_cloud(const reachability_problem& problem, std::uint64_t count,
                                   std::uint64_t seed, int threads = 0) {
    problem.check();
    if (count == 0) throw std::invalid_argument("generate_cloud: need at least one sample");

    const int n = problem.system.state_dim;
    const int w = problem.system.disturbance_dim;
    const int out_dim = problem.effective_dim();

    sample_cloud cloud(out_dim, count,
                       cloud_provenance{seed, count, problem_digest(problem)});

    std::atomic<std::uint64_t> first_failure{~0ull};
    detail::parallel_for_ranges(count, threads, [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<double> x0(n), d(w);
        for (std::uint64_t i = begin; i < end; ++i) {
            sample_stream stream(seed, i);
            draw_uniform(problem.x0, stream, x0);
            if (w > 0) draw_uniform(*problem.disturbance, stream, d);
            std::vector<double> xf;
            try {
                xf = simulate(problem.system, problem.integ, problem.t0, problem.t1, x0, d);
            } catch (const nonfinite_state&) {
                std::uint64_t prev = first_failure.load();
                while (i < prev && !first_failure.compare_exchange_weak(prev, i)) {
                }
                return;
            }
            auto slot = cloud.point(i);
            if (problem.projection.empty()) {
                for (int j = 0; j < n; ++j) slot[j] = xf[j];
            } else {
                for (int j = 0; j < out_dim; ++j) slot[j] = xf[problem.projection[j]];
            }
        }
    });

    const std::uint64_t failed = first_failure.load();
    if (failed != ~0ull)
        throw nonfinite_state("generate_cloud: simulation diverged at sample index " +
                              std::to_string(failed));
    return cloud;
}

/// Componentwise selection of coordinates (0-based indices into the cloud's
/// current dimension). Repeated projection equals projection by the composed
/// index list.
inline sample_cloud project(const sample_cloud& cloud, std::span<const int> indices) {
    if (indices.empty()) throw std::invalid_argument("project: empty index list");
    for (int idx : indices)
        if (idx < 0 || idx >= cloud.dim())
            throw std::invalid_argument("project: index out of range");

    sample_cloud out(static_cast<int>(indices.size()), cloud.size(), cloud.provenance());
    for (std::uint64_t i = 0; i < cloud.size(); ++i) {
        const auto src = cloud.point(i);
        auto dst = out.point(i);
        for (std::size_t j = 0; j < indices.size(); ++j) dst[j] = src[indices[j]];
    }
    return out;
}

} // namespace creach
