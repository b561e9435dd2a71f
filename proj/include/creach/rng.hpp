#pragma once

#include <array>
#include <cstdint>

namespace creach {

// Counter-based generator after Salmon et al., "Parallel random numbers:
// as easy as 1, 2, 3" (SC 2011). Each (seed, index) pair names its own
// stream, so sample i is the same no matter which thread draws it and no
// matter how many samples precede it.

namespace detail {

inline void philox_mulhilo(std::uint32_t a, std::uint32_t b,
                           std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

} // namespace detail

/// Philox4x32-10 block function: bijective map of a 128-bit counter under a
/// 64-bit key.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t lo0, hi0, lo1, hi1;
        detail::philox_mulhilo(m0, ctr[0], lo0, hi0);
        detail::philox_mulhilo(m1, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

/// Stream of uniform variates addressed by (seed, index). The index goes in
/// the counter's high words, so streams for different sample indices never
/// overlap; successive blocks of one stream count up in the low words.
class sample_stream {
public:
    sample_stream(std::uint64_t seed, std::uint64_t index)
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          index_(index) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            buf_ = philox4x32({static_cast<std::uint32_t>(block_),
                               static_cast<std::uint32_t>(block_ >> 32),
                               static_cast<std::uint32_t>(index_),
                               static_cast<std::uint32_t>(index_ >> 32)},
                              key_);
            ++block_;
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t index_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

/// Validation draws decorrelate from training by keying off seed XOR this
/// constant, so reusing the training seed never reuses training randomness.
inline constexpr std::uint64_t validation_seed_tweak = 0x9E3779B97F4A7C15ull;

} // namespace creach
