#pragma once

#include "mimocap/cxkernel.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mimocap {

/// streams x length block of complex samples; column k is one time instant.
class SymbolBlock {
public:
    explicit SymbolBlock(ComplexMatrix data) : data_(std::move(data)) {}

    std::size_t streams() const noexcept { return data_.rows(); }
    std::size_t length() const noexcept { return data_.cols(); }
    const ComplexMatrix& data() const noexcept { return data_; }

private:
    ComplexMatrix data_;
};

enum class DetectorKind { ls, lmmse_closed, lmmse_sample };

std::string_view to_string(DetectorKind kind) noexcept;

struct DetectionReport {
    std::vector<double> mse_per_stream;
    double overall_mse = 0.0;
    DetectorKind filter_used = DetectorKind::ls;
};

struct StreamStats {
    std::vector<double> beta;
    std::vector<double> noise_var;
    std::vector<double> post_snr;
};

/// Zero-forcing estimate (Gᴴ G)^-1 Gᴴ b. Needs rows >= cols and full column
/// rank, otherwise SingularChannelError.
SymbolBlock ls_detect(const ComplexMatrix& g, const SymbolBlock& b);

/// LMMSE estimate P_D Gᴴ (P_D G Gᴴ + sigma^2 I)^-1 b, evaluated through the
/// equivalent Nt x Nt system (Gᴴ G + sigma^2/P_D I)^-1 Gᴴ b so that sigma^2 = 0
/// reduces to least squares for tall full-rank channels.
SymbolBlock lmmse_detect(const ComplexMatrix& g, const SymbolBlock& b, double pd = 1.0, double sigma_n2 = 0.0);

/// Training-based LMMSE filter C = R_yy^-1 R_yt with both covariances
/// normalized by N - 1. Apply as adjoint(C) * y.
ComplexMatrix sample_lmmse_filter(const SymbolBlock& y, const SymbolBlock& t);

/// Per-stream LMMSE quality for a channel with nt columns, symbol energy es
/// and noise density n0.
StreamStats lmmse_stream_stats(const ComplexMatrix& g, double es, std::size_t nt, double n0);

/// Mean squared error of an estimate against the transmitted block.
DetectionReport evaluate_detection(const SymbolBlock& estimate, const SymbolBlock& reference, DetectorKind kind);

/// Unit-power QPSK symbols {±1 ± i}/sqrt(2), streams x length.
SymbolBlock qpsk_block(std::size_t streams, std::size_t length, std::uint64_t seed, std::uint64_t index);

/// The fixed 3 x 2 channel used by the link demo.
ComplexMatrix reference_link_channel();

struct DemoSeries {
    std::string name;
    std::vector<Complex> samples;
};

struct LinkDemoResult {
    std::vector<DemoSeries> series; ///< tx1 tx2 rx1 rx2 rx3 ls1 ls2 le1 le2 lmmse1 lmmse2
    std::array<DetectionReport, 3> reports; ///< ls, lmmse_sample, lmmse_closed
};

/// Two QPSK streams through reference_link_channel() plus CN(0, sigma_n2)
/// noise, detected by LS, the training-based filter and closed-form LMMSE.
LinkDemoResult link_demo(std::uint64_t seed, std::size_t length = 100, double sigma_n2 = 0.01);

} // namespace mimocap
