#include "mimocap/detect.hpp"

#include "mimocap/channel.hpp"
#include "mimocap/errors.hpp"
#include "mimocap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mimocap {

std::string_view to_string(DetectorKind kind) noexcept {
    switch (kind) {
    case DetectorKind::ls: return "ls";
    case DetectorKind::lmmse_closed: return "lmmse_closed";
    case DetectorKind::lmmse_sample: return "lmmse_sample";
    }
    return "unknown";
}

namespace {

void require_conforming(const ComplexMatrix& g, const SymbolBlock& b, const char* op) {
    if (g.rows() != b.streams()) {
        throw ShapeError(op, "channel has " + std::to_string(g.rows()) + " rows but block has " +
                                 std::to_string(b.streams()) + " streams");
    }
}

} // namespace

SymbolBlock ls_detect(const ComplexMatrix& g, const SymbolBlock& b) {
    constexpr const char* op = "ls_detect";
    require_conforming(g, b, op);
    if (g.rows() < g.cols()) {
        throw SingularChannelError(op, "fewer receive than transmit antennas");
    }
    const ComplexMatrix gh = adjoint(g);
    try {
        return SymbolBlock(hermitian_solve(matmul(gh, g), matmul(gh, b.data())));
    } catch (const DefinitenessError&) {
        throw SingularChannelError(op, "channel is rank deficient");
    }
}

SymbolBlock lmmse_detect(const ComplexMatrix& g, const SymbolBlock& b, double pd, double sigma_n2) {
    constexpr const char* op = "lmmse_detect";
    require_conforming(g, b, op);
    if (!(pd > 0.0)) {
        throw DomainError(op, "signal power must be positive");
    }
    if (!(sigma_n2 >= 0.0)) {
        throw DomainError(op, "noise variance must be nonnegative");
    }
    const ComplexMatrix gh = adjoint(g);
    ComplexMatrix system = matmul(gh, g);
    for (std::size_t i = 0; i < system.rows(); ++i) {
        system(i, i) += sigma_n2 / pd;
    }
    try {
        return SymbolBlock(hermitian_solve(system, matmul(gh, b.data())));
    } catch (const DefinitenessError&) {
        throw SingularChannelError(op, "channel is rank deficient at zero noise");
    }
}

namespace {

struct SampleCovariances {
    ComplexMatrix ryy;
    ComplexMatrix ryt;
};

SampleCovariances sample_covariances(const SymbolBlock& y, const SymbolBlock& t) {
    constexpr const char* op = "sample_lmmse_filter";
    if (y.length() != t.length()) {
        throw ShapeError(op, "observation and training blocks differ in length");
    }
    const std::size_t n = y.length();
    if (n < 2 || n < y.streams()) {
        throw InsufficientSamplesError(op, std::to_string(n) + " samples for " + std::to_string(y.streams()) +
                                               " streams");
    }
    const ComplexMatrix& yd = y.data();
    const ComplexMatrix& td = t.data();
    SampleCovariances c{ComplexMatrix(y.streams(), y.streams()), ComplexMatrix(y.streams(), t.streams())};
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < y.streams(); ++i) {
            const Complex yi = yd(i, k);
            for (std::size_t j = 0; j < y.streams(); ++j) {
                c.ryy(i, j) += yi * std::conj(yd(j, k));
            }
            for (std::size_t j = 0; j < t.streams(); ++j) {
                c.ryt(i, j) += yi * std::conj(td(j, k));
            }
        }
    }
    const double norm = 1.0 / static_cast<double>(n - 1);
    c.ryy *= norm;
    c.ryt *= norm;
    return c;
}

// Minimum-norm solution of ryy * x = ryt, used when the received signal spans fewer dimensions than antennas.
ComplexMatrix pseudo_inverse_filter(const SampleCovariances& c) {
    const HermitianEigen e = hermitian_eigen(c.ryy);
    const std::size_t n = c.ryy.rows();
    const double cutoff = 1e-10 * std::max(e.values.empty() ? 0.0 : e.values.front(), 0.0);
    ComplexMatrix inv(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(e.values[k] > cutoff)) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                inv(i, j) += e.vectors(i, k) * std::conj(e.vectors(j, k)) / e.values[k];
            }
        }
    }
    return matmul(inv, c.ryt);
}

} // namespace

ComplexMatrix sample_lmmse_filter(const SymbolBlock& y, const SymbolBlock& t) {
    const SampleCovariances c = sample_covariances(y, t);
    try {
        return hermitian_solve(c.ryy, c.ryt);
    } catch (const DefinitenessError&) {
        throw InsufficientSamplesError("sample_lmmse_filter", "sample covariance is singular");
    }
}

StreamStats lmmse_stream_stats(const ComplexMatrix& g, double es, std::size_t nt, double n0) {
    constexpr const char* op = "lmmse_stream_stats";
    if (!(es > 0.0) || !(n0 > 0.0)) {
        throw DomainError(op, "symbol energy and noise density must be positive");
    }
    if (g.cols() != nt) {
        throw ShapeError(op, "channel has " + std::to_string(g.cols()) + " columns, expected " + std::to_string(nt));
    }
    const double sigma2 = static_cast<double>(nt) * n0 / es;
    ComplexMatrix cov = matmul(g, adjoint(g));
    for (std::size_t i = 0; i < cov.rows(); ++i) {
        cov(i, i) += sigma2;
    }
    // Column i of H is the per-stream filter h_i.
    const ComplexMatrix h = hermitian_solve(cov, g);

    StreamStats stats;
    for (std::size_t i = 0; i < nt; ++i) {
        Complex inner{};
        for (std::size_t r = 0; r < g.rows(); ++r) {
            inner += std::conj(h(r, i)) * g(r, i);
        }
        const double beta = inner.real();
        stats.beta.push_back(beta);
        stats.noise_var.push_back(es / static_cast<double>(nt) * std::max(0.0, beta - beta * beta));
        stats.post_snr.push_back(beta / (1.0 - beta));
    }
    return stats;
}

DetectionReport evaluate_detection(const SymbolBlock& estimate, const SymbolBlock& reference, DetectorKind kind) {
    if (estimate.streams() != reference.streams() || estimate.length() != reference.length()) {
        throw ShapeError("evaluate_detection", "estimate and reference blocks differ in shape");
    }
    DetectionReport report;
    report.filter_used = kind;
    double total = 0.0;
    for (std::size_t s = 0; s < estimate.streams(); ++s) {
        double sum = 0.0;
        for (std::size_t k = 0; k < estimate.length(); ++k) {
            sum += std::norm(estimate.data()(s, k) - reference.data()(s, k));
        }
        report.mse_per_stream.push_back(sum / static_cast<double>(estimate.length()));
        total += sum;
    }
    report.overall_mse = total / static_cast<double>(estimate.streams() * estimate.length());
    return report;
}

SymbolBlock qpsk_block(std::size_t streams, std::size_t length, std::uint64_t seed, std::uint64_t index) {
    Substream stream(seed, StreamPurpose::symbols, index);
    const double amp = 1.0 / std::numbers::sqrt2;
    ComplexMatrix data(streams, length);
    for (std::size_t s = 0; s < streams; ++s) {
        for (std::size_t k = 0; k < length; ++k) {
            const std::uint64_t bits = stream.next_u64() >> 62;
            data(s, k) = {(bits & 1U) ? amp : -amp, (bits & 2U) ? amp : -amp};
        }
    }
    return SymbolBlock(std::move(data));
}

ComplexMatrix reference_link_channel() {
    // Written as a 2 x 3 table and transposed: rows are receive antennas.
    return ComplexMatrix{
        {{0.5, 0.6}, {0.8, 0.5}},
        {{0.15, 0.85}, {0.81, 0.86}},
        {{0.4, 0.10}, {0.05, 0.87}},
    };
}

LinkDemoResult link_demo(std::uint64_t seed, std::size_t length, double sigma_n2) {
    constexpr const char* op = "link_demo";
    if (length < 10) {
        throw DomainError(op, "need at least 10 samples");
    }
    if (!(sigma_n2 >= 0.0)) {
        throw DomainError(op, "noise variance must be nonnegative");
    }
    const ComplexMatrix g = reference_link_channel();
    const SymbolBlock tx = qpsk_block(g.cols(), length, seed, 0);
    const SymbolBlock rx(matmul(g, tx.data()) + awgn(g.rows(), length, sigma_n2, seed, 0));

    const SymbolBlock ls = ls_detect(g, rx);
    // Noiseless reception leaves the 3x3 sample covariance rank 2.
    const ComplexMatrix filter =
        sigma_n2 > 0.0 ? sample_lmmse_filter(rx, tx) : pseudo_inverse_filter(sample_covariances(rx, tx));
    const SymbolBlock le(matmul(adjoint(filter), rx.data()));
    const SymbolBlock lmmse = lmmse_detect(g, rx, 1.0, sigma_n2);

    LinkDemoResult result;
    auto append = [&](const std::string& prefix, const SymbolBlock& block) {
        for (std::size_t s = 0; s < block.streams(); ++s) {
            DemoSeries series{prefix + std::to_string(s + 1), {}};
            series.samples.reserve(length);
            for (std::size_t k = 0; k < length; ++k) {
                series.samples.push_back(block.data()(s, k));
            }
            result.series.push_back(std::move(series));
        }
    };
    append("tx", tx);
    append("rx", rx);
    append("ls", ls);
    append("le", le);
    append("lmmse", lmmse);

    result.reports = {evaluate_detection(ls, tx, DetectorKind::ls),
                      evaluate_detection(le, tx, DetectorKind::lmmse_sample),
                      evaluate_detection(lmmse, tx, DetectorKind::lmmse_closed)};
    return result;
}

} // namespace mimocap
