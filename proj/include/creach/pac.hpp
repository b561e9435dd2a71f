#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "creach/basis.hpp"

namespace creach {

/// Parameters of the PAC guarantee: the fitted sublevel set captures at
/// least 1-epsilon of the reachable-state probability mass with confidence
/// 1-delta, provided pac_sample_size() samples are used.
struct pac_params {
    double epsilon; // accuracy, in (0,1)
    double delta;   // 1 - confidence, in (0,1)
    int n;          // state dimension used for fitting (post-projection)
    int k;          // Christoffel order

    void check() const {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("pac_params: epsilon must lie in (0,1)");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("pac_params: delta must lie in (0,1)");
        if (n < 1) throw std::invalid_argument("pac_params: n must be >= 1");
        if (k < 0) throw std::invalid_argument("pac_params: k must be >= 0");
    }
};

/// One-sided certificate parameters for a-posteriori validation.
struct chernoff_params {
    double margin;     // in (0,1)
    double confidence; // in (0,1)

    void check() const {
        if (!(margin > 0.0 && margin < 1.0))
            throw std::invalid_argument("chernoff_params: margin must lie in (0,1)");
        if (!(confidence > 0.0 && confidence < 1.0))
            throw std::invalid_argument("chernoff_params: confidence must lie in (0,1)");
    }
};

/// VC dimension of the class of degree-<=2k polynomial sublevel sets in n
/// variables: the dimension binomial(n+2k, n) of the polynomial space.
inline std::uint64_t vc_dimension(int n, int k) {
    if (n < 1) throw std::invalid_argument("vc_dimension: n must be >= 1");
    if (k < 0) throw std::invalid_argument("vc_dimension: k must be >= 0");
    return basis_size(n, 2 * k);
}

/// Sample count that backs the PAC guarantee:
///   N = ceil((5/eps) * (ln(4/delta) + binomial(n+2k, n) * ln(40/eps))).
/// Natural logarithms; the ceiling is applied once, to the full expression.
inline std::uint64_t pac_sample_size(const pac_params& p) {
    p.check();
    const double vc = static_cast<double>(vc_dimension(p.n, p.k));
    const double value =
        (5.0 / p.epsilon) * (std::log(4.0 / p.delta) + vc * std::log(40.0 / p.epsilon));
    return static_cast<std::uint64_t>(std::ceil(value));
}

/// Fresh-sample count for which a one-sided Chernoff (Hoeffding) bound puts
/// the empirical accuracy within `margin` of the truth at the stated
/// confidence: ceil(ln(1/(1-confidence)) / (2 margin^2)).
inline std::uint64_t chernoff_sample_size(const chernoff_params& c) {
    c.check();
    const double value = std::log(1.0 / (1.0 - c.confidence)) / (2.0 * c.margin * c.margin);
    return static_cast<std::uint64_t>(std::ceil(value));
}

/// Certified lower bound on the true accuracy: empirical minus margin,
/// clamped into [0,1].
inline double accuracy_lower_bound(double empirical_accuracy, const chernoff_params& c) {
    c.check();
    const double v = empirical_accuracy - c.margin;
    return std::min(1.0, std::max(0.0, v));
}

} // namespace creach
