#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "creach/errors.hpp"

namespace creach {

/// Where a cloud came from: enough to regenerate or audit it.
struct cloud_provenance {
    std::uint64_t seed = 0;
    std::uint64_t count = 0;
    std::uint64_t problem_digest = 0;
};

/// N final-state vectors stored row-major, plus provenance. The effective
/// dimension is the post-projection dimension when a projection was applied.
class sample_cloud {
public:
    sample_cloud(int dim, std::uint64_t count, cloud_provenance prov = {})
        : dim_(dim), data_(static_cast<std::size_t>(count) * dim), prov_(prov) {
        if (dim < 1) throw std::invalid_argument("sample_cloud: dim must be >= 1");
        prov_.count = count;
    }

    int dim() const { return dim_; }
    std::uint64_t size() const { return data_.size() / dim_; }
    const cloud_provenance& provenance() const { return prov_; }
    cloud_provenance& provenance() { return prov_; }

    std::span<const double> point(std::uint64_t i) const {
        return {data_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<double> point(std::uint64_t i) {
        return {data_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }

    std::span<const double> raw() const { return data_; }

private:
    int dim_;
    std::vector<double> data_;
    cloud_provenance prov_;
};

} // namespace creach
