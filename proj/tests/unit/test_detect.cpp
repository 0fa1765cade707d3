#include "mimocap/channel.hpp"
#include "mimocap/detect.hpp"
#include "mimocap/errors.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mimocap;

namespace {

ComplexMatrix random_channel(oracle::Random& rng, std::size_t rows, std::size_t cols) {
    ComplexMatrix g(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            g(r, c) = rng.complex();
        }
    }
    return g;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        d = std::max(d, std::abs(a.entries()[i] - b.entries()[i]));
    }
    return d;
}

// E(b bᴴ)^-1 E(b aᴴ) for b = G a + n with unit-power symbols.
ComplexMatrix model_lmmse_filter(const ComplexMatrix& g, double sigma_n2) {
    ComplexMatrix cov = matmul(g, adjoint(g));
    for (std::size_t i = 0; i < cov.rows(); ++i) {
        cov(i, i) += sigma_n2;
    }
    return hermitian_solve(cov, g);
}

} // namespace

TEST(LsDetect, NoiselessRecoveryOnReferenceChannel) {
    const ComplexMatrix g = reference_link_channel();
    ASSERT_EQ(g.rows(), 3U);
    ASSERT_EQ(g.cols(), 2U);
    const SymbolBlock a = qpsk_block(2, 100, 1, 0);
    const SymbolBlock est = ls_detect(g, SymbolBlock(matmul(g, a.data())));
    EXPECT_LT(max_abs_diff(est.data(), a.data()), 1e-9);
}

TEST(LsDetect, DiagonalSquareChannel) {
    const std::vector<double> d{1.0, 2.0};
    const SymbolBlock est = ls_detect(ComplexMatrix::diagonal(d), SymbolBlock(ComplexMatrix{{3.0}, {4.0}}));
    EXPECT_NEAR(std::abs(est.data()(0, 0) - 3.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(est.data()(1, 0) - 2.0), 0.0, 1e-15);
}

TEST(LsDetect, NoisyReferenceLinkMse) {
    const ComplexMatrix g = reference_link_channel();
    const SymbolBlock a = qpsk_block(2, 100, 7, 0);
    const SymbolBlock b(matmul(g, a.data()) + awgn(3, 100, 0.01, 7, 0));
    const DetectionReport r = evaluate_detection(ls_detect(g, b), a, DetectorKind::ls);
    for (double mse : r.mse_per_stream) {
        EXPECT_LT(mse, 0.05);
    }
}

TEST(LsDetect, RankDeficientChannelIsSingular) {
    const ComplexMatrix g{{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}};
    EXPECT_THROW(ls_detect(g, SymbolBlock(ComplexMatrix(3, 1))), SingularChannelError);
    EXPECT_THROW(ls_detect(ComplexMatrix(1, 2), SymbolBlock(ComplexMatrix(1, 1))), SingularChannelError);
}

TEST(LsDetect, UnbiasedUnderNoise) {
    const ComplexMatrix g = reference_link_channel();
    const SymbolBlock a = qpsk_block(2, 1, 3, 0);
    Complex bias0{}, bias1{};
    constexpr int kTrials = 10000;
    for (int t = 0; t < kTrials; ++t) {
        const SymbolBlock b(matmul(g, a.data()) + awgn(3, 1, 0.01, 3, static_cast<std::uint64_t>(t)));
        const SymbolBlock est = ls_detect(g, b);
        bias0 += est.data()(0, 0) - a.data()(0, 0);
        bias1 += est.data()(1, 0) - a.data()(1, 0);
    }
    EXPECT_LT(std::sqrt(std::norm(bias0 / double(kTrials)) + std::norm(bias1 / double(kTrials))), 0.01);
}

TEST(LmmseDetect, ScalarShrinkage) {
    const SymbolBlock est = lmmse_detect(ComplexMatrix{{1.0}}, SymbolBlock(ComplexMatrix{{1.0}}), 1.0, 1.0);
    EXPECT_NEAR(est.data()(0, 0).real(), 0.5, 1e-15);
}

TEST(LmmseDetect, ApproachesLsAsNoiseVanishes) {
    oracle::Random rng(61);
    const ComplexMatrix g = random_channel(rng, 4, 2);
    const SymbolBlock b(random_channel(rng, 4, 10));
    const SymbolBlock ls = ls_detect(g, b);
    EXPECT_LT(max_abs_diff(lmmse_detect(g, b, 1.0, 1e-12).data(), ls.data()), 1e-6);
    EXPECT_LT(max_abs_diff(lmmse_detect(g, b, 1.0, 0.0).data(), ls.data()), 1e-9);
}

TEST(LmmseDetect, MatchesDirectFormula) {
    // P_D Gᴴ (P_D G Gᴴ + s2 I)^-1 b evaluated literally.
    oracle::Random rng(67);
    const ComplexMatrix g = random_channel(rng, 3, 2);
    const SymbolBlock b(random_channel(rng, 3, 5));
    const double pd = 2.0, s2 = 0.3;
    ComplexMatrix cov = matmul(g, adjoint(g));
    cov *= pd;
    for (std::size_t i = 0; i < 3; ++i) {
        cov(i, i) += s2;
    }
    ComplexMatrix direct = matmul(adjoint(g), hermitian_solve(cov, b.data()));
    direct *= pd;
    EXPECT_LT(max_abs_diff(lmmse_detect(g, b, pd, s2).data(), direct), 1e-12);
}

TEST(LmmseDetect, ErrorPaths) {
    const ComplexMatrix rank1{{1.0, 1.0}, {1.0, 1.0}};
    EXPECT_THROW(lmmse_detect(rank1, SymbolBlock(ComplexMatrix(2, 1)), 1.0, 0.0), SingularChannelError);
    EXPECT_NO_THROW(lmmse_detect(rank1, SymbolBlock(ComplexMatrix(2, 1)), 1.0, 0.1));
    EXPECT_THROW(lmmse_detect(rank1, SymbolBlock(ComplexMatrix(2, 1)), 0.0, 0.1), DomainError);
    EXPECT_THROW(lmmse_detect(rank1, SymbolBlock(ComplexMatrix(3, 1)), 1.0, 0.1), ShapeError);
}

TEST(LmmseDetect, ShrinksRelativeToLs) {
    oracle::Random rng(71);
    double ls_norm = 0.0, lmmse_norm = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const ComplexMatrix g = random_channel(rng, 4, 2);
        const SymbolBlock a = qpsk_block(2, 1, 71, static_cast<std::uint64_t>(t));
        const SymbolBlock b(matmul(g, a.data()) + awgn(4, 1, 0.1, 71, static_cast<std::uint64_t>(t)));
        const SymbolBlock ls = ls_detect(g, b);
        const SymbolBlock mm = lmmse_detect(g, b, 1.0, 0.1);
        const double n_ls = std::sqrt(frobenius_sq(ls.data()));
        const double n_mm = std::sqrt(frobenius_sq(mm.data()));
        ASSERT_LE(n_mm, n_ls + 1e-9);
        ls_norm += n_ls;
        lmmse_norm += n_mm;
    }
    EXPECT_LE(lmmse_norm, ls_norm);
}

TEST(SampleLmmseFilter, SelfPredictionIsIdentity) {
    const SymbolBlock y(qpsk_block(3, 5000, 5, 0).data() + awgn(3, 5000, 0.1, 5, 0));
    const ComplexMatrix c = sample_lmmse_filter(y, y);
    EXPECT_LT(std::sqrt(frobenius_sq(c - ComplexMatrix::identity(3))), 0.05);
}

TEST(SampleLmmseFilter, InsufficientSamples) {
    const SymbolBlock y(ComplexMatrix(3, 2));
    EXPECT_THROW(sample_lmmse_filter(y, y), InsufficientSamplesError);
    const SymbolBlock zeros(ComplexMatrix(2, 50));
    EXPECT_THROW(sample_lmmse_filter(zeros, zeros), InsufficientSamplesError);
    EXPECT_THROW(sample_lmmse_filter(SymbolBlock(ComplexMatrix(2, 10)), SymbolBlock(ComplexMatrix(2, 11))),
                 ShapeError);
}

TEST(SampleLmmseFilter, ConvergesToModelFilter) {
    const ComplexMatrix g = reference_link_channel();
    const ComplexMatrix target = model_lmmse_filter(g, 0.01);
    std::vector<double> distance;
    for (std::size_t n : {1000U, 4000U, 16000U, 100000U}) {
        const SymbolBlock t = qpsk_block(2, n, 13, 0);
        const SymbolBlock y(matmul(g, t.data()) + awgn(3, n, 0.01, 13, 0));
        distance.push_back(std::sqrt(frobenius_sq(sample_lmmse_filter(y, t) - target)));
    }
    EXPECT_LT(distance.back(), 0.05);
    // Error shrinks like 1/sqrt(N); allow Monte-Carlo wiggle between steps.
    for (std::size_t i = 1; i < distance.size(); ++i) {
        EXPECT_LT(distance[i], 1.2 * distance[i - 1]);
    }
    EXPECT_LT(distance.back(), distance.front());
}

TEST(LmmseStreamStats, ScalarChannel) {
    const ComplexMatrix g{{Complex(0.6, 0.8)}};
    // sigma^2 = nt n0 / es = 0.25
    const StreamStats s = lmmse_stream_stats(g, 4.0, 1, 1.0);
    EXPECT_NEAR(s.beta[0], 1.0 / 1.25, 1e-14);
    EXPECT_NEAR(s.post_snr[0], 4.0, 1e-12);
    EXPECT_NEAR(s.noise_var[0], 4.0 * (0.8 - 0.64), 1e-12);
}

TEST(LmmseStreamStats, OrthogonalEqualColumnsAreSymmetric) {
    ComplexMatrix g = ComplexMatrix::identity(2);
    g *= 1.7;
    const StreamStats s = lmmse_stream_stats(g, 1.0, 2, 0.1);
    EXPECT_DOUBLE_EQ(s.beta[0], s.beta[1]);
}

TEST(LmmseStreamStats, MatchesTwoByTwoCovarianceOracle) {
    oracle::Random rng(73);
    for (int t = 0; t < 200; ++t) {
        const ComplexMatrix g = random_channel(rng, 4, 2);
        const double es = rng.uniform(0.5, 4.0), n0 = rng.uniform(0.01, 1.0);
        std::vector<Complex> c0, c1;
        for (std::size_t r = 0; r < 4; ++r) {
            c0.push_back(g(r, 0));
            c1.push_back(g(r, 1));
        }
        const auto expected = oracle::two_stream_beta(c0, c1, 2.0 * n0 / es);
        const StreamStats s = lmmse_stream_stats(g, es, 2, n0);
        EXPECT_NEAR(s.beta[0], expected[0], 1e-8);
        EXPECT_NEAR(s.beta[1], expected[1], 1e-8);
    }
}

TEST(LmmseStreamStats, InterferenceVarianceNonNegative) {
    oracle::Random rng(79);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t nt = rng.index(1, 4);
        const ComplexMatrix g = random_channel(rng, rng.index(1, 5), nt);
        const StreamStats s = lmmse_stream_stats(g, 1.0, nt, rng.uniform(0.001, 2.0));
        for (std::size_t i = 0; i < nt; ++i) {
            ASSERT_GE(s.beta[i], 0.0);
            ASSERT_LT(s.beta[i], 1.0);
            ASSERT_GE(s.noise_var[i], 0.0);
        }
    }
    EXPECT_THROW(lmmse_stream_stats(ComplexMatrix(2, 2), 1.0, 2, 0.0), DomainError);
    EXPECT_THROW(lmmse_stream_stats(ComplexMatrix(2, 2), 1.0, 3, 1.0), ShapeError);
}

TEST(LinkDemo, NoiselessLsIsExact) {
    const LinkDemoResult r = link_demo(4, 50, 0.0);
    ASSERT_EQ(r.series.size(), 11U);
    const auto& tx1 = r.series[0].samples;
    const auto& ls1 = r.series[5].samples;
    EXPECT_EQ(r.series[5].name, "ls1");
    for (std::size_t k = 0; k < tx1.size(); ++k) {
        EXPECT_LT(std::abs(tx1[k] - ls1[k]), 1e-12);
    }
}

TEST(LinkDemo, DefaultRunShapesAndMse) {
    const LinkDemoResult r = link_demo(2024);
    const std::vector<std::string> names{"tx1", "tx2", "rx1", "rx2", "rx3", "ls1",
                                         "ls2", "le1", "le2", "lmmse1", "lmmse2"};
    ASSERT_EQ(r.series.size(), names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        EXPECT_EQ(r.series[i].name, names[i]);
        EXPECT_EQ(r.series[i].samples.size(), 100U);
    }
    for (const DetectionReport& rep : r.reports) {
        for (double mse : rep.mse_per_stream) {
            EXPECT_LT(mse, 0.05) << to_string(rep.filter_used);
        }
    }
    EXPECT_THROW(link_demo(1, 5, 0.01), DomainError);
}
