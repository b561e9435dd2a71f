#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "creach/errors.hpp"

namespace creach {

/// Exponent tuple of one monomial: x1^e1 * ... * xn^en.
struct multi_index {
    std::vector<std::uint8_t> exponents;

    int degree() const {
        int d = 0;
        for (auto e : exponents) d += e;
        return d;
    }

    friend bool operator==(const multi_index&, const multi_index&) = default;
};

/// Number of monomials of degree <= k in n variables: binomial(n+k, n).
/// Throws std::overflow_error when the count exceeds 64 bits.
inline std::uint64_t basis_size(int n, int k) {
    if (n < 1) throw std::invalid_argument("basis_size: n must be >= 1");
    if (k < 0) throw std::invalid_argument("basis_size: k must be >= 0");
    // binomial(n+k, min(n,k)) by the integral recurrence
    // C(a, i) = C(a, i-1) * (a - i + 1) / i; after canceling gcd(num, i)
    // the reduced i divides the running value exactly, so every
    // intermediate is a true binomial and the overflow test never fires
    // spuriously.
    const std::uint64_t a = static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(k);
    const std::uint64_t b = static_cast<std::uint64_t>(std::min(n, k));
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= b; ++i) {
        const std::uint64_t num = a - i + 1;
        const std::uint64_t g = std::gcd(num, i);
        const std::uint64_t num_reduced = num / g;
        result /= i / g;
        if (num_reduced != 0 &&
            result > std::numeric_limits<std::uint64_t>::max() / num_reduced)
            throw std::overflow_error("basis_size: binomial overflows uint64");
        result *= num_reduced;
    }
    return result;
}

/// Ordered monomial basis for degree <= k in n variables, graded
/// lexicographic: total degree ascending, ties by ascending lexicographic
/// comparison of exponent tuples. Index 0 is the constant monomial.
/// Immutable after construction; evaluation walks the stored predecessor
/// links so each monomial costs one multiply.
class monomial_basis {
public:
    monomial_basis(int n, int k, std::vector<multi_index> indices)
        : n_(n), k_(k), indices_(std::move(indices)) {
        build_eval_plan();
    }

    int n() const { return n_; }
    int k() const { return k_; }
    std::size_t size() const { return indices_.size(); }
    const std::vector<multi_index>& indices() const { return indices_; }

    /// Writes z_k(x) into out (size() slots). Component j is the product of
    /// x_i^(exponents of index j); the constant slot is exactly 1.
    void evaluate(std::span<const double> x, std::span<double> out) const {
        if (x.size() != static_cast<std::size_t>(n_))
            throw dimension_mismatch("monomial_basis::evaluate: x has wrong dimension");
        if (out.size() != indices_.size())
            throw dimension_mismatch("monomial_basis::evaluate: output has wrong size");
        out[0] = 1.0;
        for (std::size_t j = 1; j < indices_.size(); ++j)
            out[j] = out[parent_[j]] * x[variable_[j]];
    }

    std::vector<double> evaluate(std::span<const double> x) const {
        std::vector<double> out(indices_.size());
        evaluate(x, out);
        return out;
    }

private:
    void build_eval_plan() {
        if (n_ < 1) throw std::invalid_argument("monomial_basis: n must be >= 1");
        if (k_ < 0) throw std::invalid_argument("monomial_basis: k must be >= 0");
        if (indices_.empty() || indices_[0].degree() != 0)
            throw std::invalid_argument("monomial_basis: index 0 must be the constant");
        parent_.assign(indices_.size(), 0);
        variable_.assign(indices_.size(), 0);
        std::map<std::vector<std::uint8_t>, std::uint32_t> position;
        for (std::size_t j = 0; j < indices_.size(); ++j) {
            const auto& e = indices_[j].exponents;
            if (e.size() != static_cast<std::size_t>(n_))
                throw std::invalid_argument("monomial_basis: exponent tuple has wrong length");
            if (indices_[j].degree() > k_)
                throw std::invalid_argument("monomial_basis: exponent tuple exceeds degree bound");
            if (!position.emplace(e, static_cast<std::uint32_t>(j)).second)
                throw std::invalid_argument("monomial_basis: duplicate exponent tuple");
            if (j == 0) continue;
            // predecessor: first variable with a positive exponent, decremented
            std::vector<std::uint8_t> pred = e;
            std::size_t var = 0;
            while (var < pred.size() && pred[var] == 0) ++var;
            pred[var] -= 1;
            auto it = position.find(pred);
            if (it == position.end())
                throw std::invalid_argument("monomial_basis: basis is not downward closed in graded order");
            parent_[j] = it->second;
            variable_[j] = static_cast<std::uint32_t>(var);
        }
    }

    int n_;
    int k_;
    std::vector<multi_index> indices_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> variable_;
};

namespace detail {

inline void enumerate_compositions(int slots, int total, std::vector<std::uint8_t>& scratch,
                                   std::vector<multi_index>& out) {
    if (slots == 1) {
        scratch.push_back(static_cast<std::uint8_t>(total));
        out.push_back(multi_index{scratch});
        scratch.pop_back();
        return;
    }
    for (int head = 0; head <= total; ++head) {
        scratch.push_back(static_cast<std::uint8_t>(head));
        enumerate_compositions(slots - 1, total - head, scratch, out);
        scratch.pop_back();
    }
}

} // namespace detail

/// Complete graded-lexicographic basis for (n, k). Deterministic; the same
/// arguments always yield the identical ordered index list.
inline monomial_basis enumerate_basis(int n, int k) {
    if (n < 1) throw std::invalid_argument("enumerate_basis: n must be >= 1");
    if (k < 0) throw std::invalid_argument("enumerate_basis: k must be >= 0");
    if (k > 255) throw std::invalid_argument("enumerate_basis: k must be <= 255");
    const std::uint64_t m = basis_size(n, k);
    std::vector<multi_index> indices;
    indices.reserve(m);
    std::vector<std::uint8_t> scratch;
    for (int d = 0; d <= k; ++d)
        detail::enumerate_compositions(n, d, scratch, indices);
    return monomial_basis(n, k, std::move(indices));
}

} // namespace creach
