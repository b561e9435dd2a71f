#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "creach/christoffel.hpp"
#include "creach/pac.hpp"
#include "creach/sampler.hpp"

namespace creach {

/// A-posteriori validation result: n_out of n_ap fresh points fell outside
/// the sublevel set, so the empirical accuracy is 1 - n_out/n_ap and the
/// one-sided certificate lower-bounds the truth by empirical - margin.
struct accuracy_report {
    std::uint64_t n_ap = 0;
    std::uint64_t n_out = 0;
    double empirical_accuracy = 1.0;
    chernoff_params chernoff{};
    double certified_lower_bound = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> outliers; // filled only on request
};

/// Certified lower bound from a finished report.
inline double accuracy_lower_bound(const accuracy_report& report) {
    return accuracy_lower_bound(report.empirical_accuracy, report.chernoff);
}

/// Count membership failures of an existing point cloud. Used by the fresh
/// draw below and by training-cloud self-validation.
inline accuracy_report validate_on_cloud(const christoffel_estimator& est,
                                         const sample_cloud& cloud, chernoff_params c,
                                         int threads = 0, bool keep_outliers = false) {
    c.check();
    if (cloud.dim() != est.basis().n())
        throw dimension_mismatch("validate: cloud dimension does not match the estimator");

    const std::uint64_t n_ap = cloud.size();
    std::atomic<std::uint64_t> n_out{0};
    detail::parallel_for_ranges(n_ap, threads, [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<double> xn(est.basis().n());
        std::vector<double> v(est.basis().size());
        std::uint64_t local = 0;
        for (std::uint64_t i = begin; i < end; ++i)
            if (est.evaluate_with_scratch(cloud.point(i), xn, v) > est.alpha()) ++local;
        n_out.fetch_add(local);
    });

    accuracy_report report;
    report.n_ap = n_ap;
    report.n_out = n_out.load();
    report.empirical_accuracy =
        1.0 - static_cast<double>(report.n_out) / static_cast<double>(report.n_ap);
    report.chernoff = c;
    report.certified_lower_bound = accuracy_lower_bound(report.empirical_accuracy, c);
    report.seed = cloud.provenance().seed;

    if (keep_outliers && report.n_out > 0) {
        for (std::uint64_t i = 0; i < n_ap; ++i) {
            const auto p = cloud.point(i);
            if (est.evaluate(p) > est.alpha())
                report.outliers.emplace_back(p.begin(), p.end());
        }
    }
    return report;
}

/// Draw chernoff_sample_size(c) fresh iid samples and report the empirical
/// accuracy of the estimate on them. The draw uses streams keyed by
/// seed XOR validation_seed_tweak, so passing the training seed never
/// replays training randomness.
inline accuracy_report validate(const christoffel_estimator& est,
                                const reachability_problem& problem, chernoff_params c,
                                std::uint64_t seed, int threads = 0,
                                bool keep_outliers = false) {
    c.check();
    if (problem.effective_dim() != est.basis().n())
        throw dimension_mismatch(
            "validate: problem's effective dimension does not match the estimator");

    const std::uint64_t n_ap = chernoff_sample_size(c);
    const sample_cloud fresh =
        generate_cloud(problem, n_ap, seed ^ validation_seed_tweak, threads);
    accuracy_report report = validate_on_cloud(est, fresh, c, threads, keep_outliers);
    report.seed = seed;
    return report;
}

} // namespace creach
