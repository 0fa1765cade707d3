#pragma once

#include "mimocap/cxkernel.hpp"

#include <cstdint>

namespace mimocap {

/// Tags that separate independent random streams drawn from one master seed.
enum class StreamPurpose : std::uint64_t {
    rayleigh = 1,
    noise = 2,
    fading = 3,
    symbols = 4,
};

/// Counter-based random stream. The key is a hash of (master seed, purpose,
/// index) and draw i is a SplitMix64 finalization of key + i * gamma, so any
/// substream can be reconstructed independently of how work is scheduled.
class Substream {
public:
    Substream(std::uint64_t master_seed, StreamPurpose purpose, std::uint64_t index) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;

    /// Circularly-symmetric complex Gaussian CN(0, variance) by Box-Muller.
    Complex complex_normal(double variance) noexcept;

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace mimocap
