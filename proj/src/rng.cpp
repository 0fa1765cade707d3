#include "mimocap/rng.hpp"

#include <cmath>
#include <numbers>

namespace mimocap {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

Substream::Substream(std::uint64_t master_seed, StreamPurpose purpose, std::uint64_t index) noexcept {
    std::uint64_t k = mix64(master_seed + kGamma);
    k = mix64(k ^ (static_cast<std::uint64_t>(purpose) * 0xD1B54A32D192ED03ULL));
    k = mix64(k ^ (index * 0xAEF17502108EF2D9ULL + kGamma));
    key_ = k;
}

std::uint64_t Substream::next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

double Substream::uniform() noexcept {
    // (u + 0.5) / 2^53 keeps both endpoints out.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

Complex Substream::complex_normal(double variance) noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    // |z|^2 = variance * Exp(1), phase uniform.
    const double radius = std::sqrt(-variance * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

} // namespace mimocap
