#pragma once

#include "mimocap/cxkernel.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mimocap {

enum class ChannelModel { rayleigh, path, ar1_snapshot };

std::string_view to_string(ChannelModel model) noexcept;

/// One Nr x Nt channel draw and the inputs that reproduce it.
struct ChannelRealization {
    ComplexMatrix g;
    ChannelModel model = ChannelModel::rayleigh;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

/// One discrete propagation path. The delay is carried for completeness; the
/// narrowband synthesis does not use it.
struct RayPath {
    Complex beta;
    double aod_rad = 0.0;
    double aoa_rad = 0.0;
    double delay_s = 0.0;
};

/// Uniform linear array.
struct ArrayGeometry {
    std::size_t elements = 1;
    double spacing_wavelengths = 0.5;
};

struct FadingTapConfig {
    double fd_t = 0.0; ///< normalized Doppler f_D * T, in [0, 0.5)
    std::size_t length = 1;
    std::uint64_t seed = 0;
};

/// i.i.d. CN(0, 1) entries, nr rows by nt columns.
ChannelRealization rayleigh_channel(std::size_t nt, std::size_t nr, std::uint64_t seed, std::uint64_t index);

/// G[m, n] = sum_l beta_l * exp(i 2pi d_rx m sin(aoa_l)) * exp(i 2pi d_tx n sin(aod_l)).
ComplexMatrix path_channel(std::span<const RayPath> paths, const ArrayGeometry& tx, const ArrayGeometry& rx);

/// Bessel function of the first kind, order zero. Even in x.
double bessel_j0(double x);

/// AR(1) tap g_k = a g_{k-1} + v_k with a = J0(2pi fd_t) and var(v) = 1 - a^2,
/// started from the stationary CN(0, 1) law. tap_index selects an independent
/// stream under the same seed.
std::vector<Complex> ar1_fading_sequence(const FadingTapConfig& cfg, std::uint64_t tap_index = 0);

/// AR(1) coefficient used by ar1_fading_sequence.
double ar1_coefficient(double fd_t);

/// A time series of Nr x Nt channels whose entries are independent AR(1) taps.
/// Snapshot k is the channel at time k.
std::vector<ChannelRealization> ar1_channel_snapshots(std::size_t nt, std::size_t nr, const FadingTapConfig& cfg);

/// Jakes Doppler spectrum 1 / (pi fd sqrt(1 - (f/fd)^2)) inside the band and 0
/// outside. At |f| == fd the spectrum has a pole and +infinity is returned;
/// check with std::isinf.
double jakes_psd(double f, double fd);

/// i.i.d. CN(0, variance) entries.
ComplexMatrix awgn(std::size_t rows, std::size_t cols, double variance, std::uint64_t seed, std::uint64_t index);

/// P_R = P_t / (K Nt Nr) * sum_k ||G_k||_F^2 over the K given realizations.
double avg_received_power(std::span<const ChannelRealization> channels, double pt);

} // namespace mimocap
