#pragma once

#include <stdexcept>
#include <string>

namespace creach {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A vector argument does not match the dimension the callee expects.
struct dimension_mismatch : error {
    using error::error;
};

/// Fewer sample points than moment-matrix rows; the fit is underdetermined.
struct insufficient_samples : error {
    using error::error;
};

/// The moment matrix could not be factorized even at maximum jitter,
/// i.e. the sample cloud is degenerate (all points on the zero set of a
/// single low-degree polynomial, or worse).
struct singular_moment : error {
    using error::error;
};

/// Integration produced a non-finite state (blow-up or step too large).
struct nonfinite_state : error {
    using error::error;
};

/// An interval endpoint ordering was violated where monotone dynamics
/// should have preserved it.
struct monotonicity_violated : error {
    using error::error;
};

/// Malformed or inconsistent run configuration / document.
struct config_error : error {
    using error::error;
};

} // namespace creach
