#include "mimocap/channel.hpp"

#include "mimocap/errors.hpp"
#include "mimocap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace mimocap {

std::string_view to_string(ChannelModel model) noexcept {
    switch (model) {
    case ChannelModel::rayleigh: return "rayleigh";
    case ChannelModel::path: return "path";
    case ChannelModel::ar1_snapshot: return "ar1-snapshot";
    }
    return "unknown";
}

ChannelRealization rayleigh_channel(std::size_t nt, std::size_t nr, std::uint64_t seed, std::uint64_t index) {
    if (nt == 0 || nr == 0) {
        throw ShapeError("rayleigh_channel", "antenna counts must be positive");
    }
    Substream stream(seed, StreamPurpose::rayleigh, index);
    ComplexMatrix g(nr, nt);
    for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t c = 0; c < nt; ++c) {
            g(r, c) = stream.complex_normal(1.0);
        }
    }
    return {std::move(g), ChannelModel::rayleigh, seed, index};
}

ComplexMatrix path_channel(std::span<const RayPath> paths, const ArrayGeometry& tx, const ArrayGeometry& rx) {
    constexpr const char* op = "path_channel";
    if (paths.empty()) {
        throw DomainError(op, "path list is empty");
    }
    for (const ArrayGeometry* geo : {&tx, &rx}) {
        if (geo->elements == 0 || !(geo->spacing_wavelengths > 0.0)) {
            throw DomainError(op, "array needs >= 1 element and positive spacing");
        }
    }
    ComplexMatrix g(rx.elements, tx.elements);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const RayPath& path : paths) {
        if (!(path.delay_s >= 0.0)) {
            throw DomainError(op, "path delay must be nonnegative");
        }
        const double rx_step = two_pi * rx.spacing_wavelengths * std::sin(path.aoa_rad);
        const double tx_step = two_pi * tx.spacing_wavelengths * std::sin(path.aod_rad);
        for (std::size_t m = 0; m < rx.elements; ++m) {
            const Complex rx_phase = std::polar(1.0, rx_step * static_cast<double>(m));
            for (std::size_t n = 0; n < tx.elements; ++n) {
                g(m, n) += path.beta * rx_phase * std::polar(1.0, tx_step * static_cast<double>(n));
            }
        }
    }
    return g;
}

double bessel_j0(double x) {
    return std::cyl_bessel_j(0.0, std::abs(x));
}

double ar1_coefficient(double fd_t) {
    if (!(fd_t >= 0.0) || !(fd_t < 0.5)) {
        throw DomainError("ar1_fading_sequence", "normalized Doppler must lie in [0, 0.5), got " + std::to_string(fd_t));
    }
    return bessel_j0(2.0 * std::numbers::pi * fd_t);
}

std::vector<Complex> ar1_fading_sequence(const FadingTapConfig& cfg, std::uint64_t tap_index) {
    const double a = ar1_coefficient(cfg.fd_t);
    if (cfg.length == 0) {
        throw DomainError("ar1_fading_sequence", "sequence length must be positive");
    }
    const double innovation_var = std::max(0.0, 1.0 - a * a);
    Substream stream(cfg.seed, StreamPurpose::fading, tap_index);

    std::vector<Complex> taps;
    taps.reserve(cfg.length);
    taps.push_back(stream.complex_normal(1.0));
    for (std::size_t k = 1; k < cfg.length; ++k) {
        taps.push_back(a * taps.back() + stream.complex_normal(innovation_var));
    }
    return taps;
}

std::vector<ChannelRealization> ar1_channel_snapshots(std::size_t nt, std::size_t nr, const FadingTapConfig& cfg) {
    if (nt == 0 || nr == 0) {
        throw ShapeError("ar1_channel_snapshots", "antenna counts must be positive");
    }
    std::vector<std::vector<Complex>> taps;
    taps.reserve(nt * nr);
    for (std::size_t e = 0; e < nt * nr; ++e) {
        taps.push_back(ar1_fading_sequence(cfg, e));
    }
    std::vector<ChannelRealization> out;
    out.reserve(cfg.length);
    for (std::size_t k = 0; k < cfg.length; ++k) {
        ComplexMatrix g(nr, nt);
        for (std::size_t r = 0; r < nr; ++r) {
            for (std::size_t c = 0; c < nt; ++c) {
                g(r, c) = taps[r * nt + c][k];
            }
        }
        out.push_back({std::move(g), ChannelModel::ar1_snapshot, cfg.seed, k});
    }
    return out;
}

double jakes_psd(double f, double fd) {
    if (!(fd > 0.0)) {
        throw DomainError("jakes_psd", "maximum Doppler must be positive");
    }
    const double ratio = std::abs(f) / fd;
    if (ratio > 1.0) {
        return 0.0;
    }
    if (ratio == 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 / (std::numbers::pi * fd * std::sqrt(1.0 - ratio * ratio));
}

ComplexMatrix awgn(std::size_t rows, std::size_t cols, double variance, std::uint64_t seed, std::uint64_t index) {
    if (!(variance >= 0.0) || !std::isfinite(variance)) {
        throw DomainError("awgn", "noise variance must be finite and nonnegative");
    }
    ComplexMatrix n(rows, cols);
    if (variance == 0.0) {
        return n;
    }
    Substream stream(seed, StreamPurpose::noise, index);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            n(r, c) = stream.complex_normal(variance);
        }
    }
    return n;
}

double avg_received_power(std::span<const ChannelRealization> channels, double pt) {
    constexpr const char* op = "avg_received_power";
    if (channels.empty()) {
        throw DomainError(op, "no channel realizations given");
    }
    if (!(pt >= 0.0)) {
        throw DomainError(op, "transmit power must be nonnegative");
    }
    const std::size_t nr = channels.front().g.rows();
    const std::size_t nt = channels.front().g.cols();
    double sum = 0.0;
    for (const ChannelRealization& ch : channels) {
        if (ch.g.rows() != nr || ch.g.cols() != nt) {
            throw DomainError(op, "realizations have mixed dimensions");
        }
        sum += frobenius_sq(ch.g);
    }
    const double k = static_cast<double>(channels.size());
    return pt / (k * static_cast<double>(nt * nr)) * sum;
}

} // namespace mimocap
