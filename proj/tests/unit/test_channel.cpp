#include "mimocap/channel.hpp"
#include "mimocap/errors.hpp"
#include "mimocap/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mimocap;

TEST(Substream, ReplayIsBitwiseIdentical) {
    Substream a(42, StreamPurpose::noise, 7);
    Substream b(42, StreamPurpose::noise, 7);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
    }
}

TEST(Substream, PurposeAndIndexSeparateStreams) {
    EXPECT_NE(Substream(1, StreamPurpose::noise, 0).key(), Substream(1, StreamPurpose::rayleigh, 0).key());
    EXPECT_NE(Substream(1, StreamPurpose::noise, 0).key(), Substream(1, StreamPurpose::noise, 1).key());
    EXPECT_NE(Substream(1, StreamPurpose::noise, 0).key(), Substream(2, StreamPurpose::noise, 0).key());
}

TEST(Substream, UniformStaysInOpenInterval) {
    Substream s(9, StreamPurpose::symbols, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(RayleighChannel, DeterministicPerSeedAndIndex) {
    const auto a = rayleigh_channel(3, 2, 5, 11);
    const auto b = rayleigh_channel(3, 2, 5, 11);
    EXPECT_EQ(a.g, b.g);
    EXPECT_EQ(a.g.rows(), 2U);
    EXPECT_EQ(a.g.cols(), 3U);
    EXPECT_EQ(a.model, ChannelModel::rayleigh);
    EXPECT_NE(a.g, rayleigh_channel(3, 2, 5, 12).g);
    EXPECT_THROW(rayleigh_channel(0, 2, 5, 0), ShapeError);
}

TEST(RayleighChannel, MomentsAndIndependence) {
    constexpr int kDraws = 100000;
    double power = 0.0, fourth = 0.0;
    Complex cross{};
    double p0 = 0.0, p1 = 0.0;
    for (int k = 0; k < kDraws; ++k) {
        const auto ch = rayleigh_channel(2, 1, 77, static_cast<std::uint64_t>(k));
        const Complex g0 = ch.g(0, 0);
        const Complex g1 = ch.g(0, 1);
        power += std::norm(g0);
        fourth += std::norm(g0) * std::norm(g0);
        cross += g0 * std::conj(g1);
        p0 += std::norm(g0);
        p1 += std::norm(g1);
    }
    const double mean_power = power / kDraws;
    EXPECT_GE(mean_power, 0.99);
    EXPECT_LE(mean_power, 1.01);
    EXPECT_NEAR(fourth / kDraws, 2.0, 0.1);
    const double rho = std::abs(cross) / std::sqrt(p0 * p1);
    EXPECT_LT(rho, 0.01);
}

TEST(PathChannel, SinglePathSingleElement) {
    const std::vector<RayPath> paths{{{0.3, -0.4}, 0.7, -0.2, 1e-6}};
    const ComplexMatrix g = path_channel(paths, {1, 0.5}, {1, 0.5});
    EXPECT_NEAR(std::abs(g(0, 0) - Complex(0.3, -0.4)), 0.0, 1e-15);
}

TEST(PathChannel, BroadsidePathIsConstant) {
    const Complex beta{1.5, 0.25};
    const std::vector<RayPath> paths{{beta, 0.0, 0.0, 0.0}};
    const ComplexMatrix g = path_channel(paths, {4, 0.5}, {3, 0.7});
    for (const Complex& z : g.entries()) {
        EXPECT_NEAR(std::abs(z - beta), 0.0, 1e-15);
    }
}

TEST(PathChannel, SteeringPhaseByHand) {
    // Half-wavelength spacing, 30 degree arrival: phase pi * m * 0.5 per element.
    const std::vector<RayPath> paths{{{1.0, 0.0}, 0.0, std::numbers::pi / 6.0, 0.0}};
    const ComplexMatrix g = path_channel(paths, {1, 0.5}, {3, 0.5});
    for (std::size_t m = 0; m < 3; ++m) {
        const double phase = std::numbers::pi * 0.5 * static_cast<double>(m);
        EXPECT_NEAR(std::abs(g(m, 0) - std::polar(1.0, phase)), 0.0, 1e-12);
    }
}

TEST(PathChannel, AdditiveOverPathLists) {
    oracle::Random rng(5);
    std::vector<RayPath> first, second;
    for (int i = 0; i < 3; ++i) {
        first.push_back({rng.complex(), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), 0.0});
        second.push_back({rng.complex(), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), 0.0});
    }
    std::vector<RayPath> both = first;
    both.insert(both.end(), second.begin(), second.end());
    const ArrayGeometry tx{4, 0.5}, rx{3, 0.5};
    const ComplexMatrix sum = path_channel(first, tx, rx) + path_channel(second, tx, rx);
    const ComplexMatrix joint = path_channel(both, tx, rx);
    EXPECT_LT(frobenius_sq(sum - joint), 1e-24);

    double bound = 0.0;
    for (const RayPath& p : both) {
        bound += std::abs(p.beta);
    }
    for (const Complex& z : joint.entries()) {
        EXPECT_LE(std::abs(z), bound + 1e-12);
    }
}

TEST(PathChannel, ErrorPaths) {
    EXPECT_THROW(path_channel({}, {2, 0.5}, {2, 0.5}), DomainError);
    const std::vector<RayPath> negative{{{1.0, 0.0}, 0.0, 0.0, -1.0}};
    EXPECT_THROW(path_channel(negative, {2, 0.5}, {2, 0.5}), DomainError);
    const std::vector<RayPath> ok{{{1.0, 0.0}, 0.0, 0.0, 0.0}};
    EXPECT_THROW(path_channel(ok, {2, 0.0}, {2, 0.5}), DomainError);
}

TEST(BesselJ0, AgainstPowerSeriesOracle) {
    EXPECT_EQ(bessel_j0(0.0), 1.0);
    EXPECT_NEAR(bessel_j0(2.40483), 0.0, 1e-5);
    EXPECT_NEAR(bessel_j0(1.0), oracle::j0_series(1.0), 1e-12);
    EXPECT_NEAR(bessel_j0(1.0), 0.765198, 1e-6);
    for (double x = -8.0; x <= 8.0; x += 0.37) {
        EXPECT_NEAR(bessel_j0(x), oracle::j0_series(x, 60), 1e-8) << "x = " << x;
    }
}

TEST(BesselJ0, LargeArgumentReferenceValues) {
    // mpmath.besselj(0, x) at 50 digits.
    EXPECT_NEAR(bessel_j0(10.0), -0.245935764451348, 1e-8);
    EXPECT_NEAR(bessel_j0(25.3), 0.12880722162791, 1e-8);
    EXPECT_NEAR(bessel_j0(30.0), -0.0863679835810402, 1e-8);
    EXPECT_NEAR(bessel_j0(49.5), 0.00197209936205728, 1e-8);
    for (double x = 0.0; x <= 50.0; x += 0.5) {
        EXPECT_LE(std::abs(bessel_j0(x)), 1.0);
    }
}

TEST(Ar1Fading, StaticChannelAtZeroDoppler) {
    const auto seq = ar1_fading_sequence({0.0, 50, 3});
    ASSERT_EQ(seq.size(), 50U);
    for (const Complex& z : seq) {
        EXPECT_EQ(z, seq.front());
    }
}

TEST(Ar1Fading, RejectsDopplerAtOrBeyondNyquist) {
    EXPECT_THROW(ar1_fading_sequence({0.5, 10, 1}), DomainError);
    EXPECT_THROW(ar1_fading_sequence({-0.1, 10, 1}), DomainError);
}

TEST(Ar1Fading, AutocorrelationFollowsArPowers) {
    constexpr std::size_t kLength = 1000000;
    const auto seq = ar1_fading_sequence({0.05, kLength, 2024});
    const double a = ar1_coefficient(0.05);
    double power = 0.0;
    for (const Complex& z : seq) {
        power += std::norm(z);
    }
    power /= kLength;
    for (std::size_t lag = 1; lag <= 5; ++lag) {
        Complex acc{};
        for (std::size_t k = lag; k < kLength; ++k) {
            acc += seq[k] * std::conj(seq[k - lag]);
        }
        const double rho = acc.real() / static_cast<double>(kLength - lag) / power;
        EXPECT_NEAR(rho, std::pow(a, static_cast<double>(lag)), 0.03) << "lag " << lag;
    }
}

TEST(Ar1ChannelSnapshots, ShapesAndReplay) {
    const auto a = ar1_channel_snapshots(3, 2, {0.1, 20, 8});
    const auto b = ar1_channel_snapshots(3, 2, {0.1, 20, 8});
    ASSERT_EQ(a.size(), 20U);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].g, b[k].g);
        EXPECT_EQ(a[k].index, k);
        EXPECT_EQ(a[k].model, ChannelModel::ar1_snapshot);
    }
}

TEST(JakesPsd, ValuesAndNormalization) {
    const double fd = 100.0;
    EXPECT_DOUBLE_EQ(jakes_psd(0.0, fd), 1.0 / (std::numbers::pi * fd));
    EXPECT_EQ(jakes_psd(150.0, fd), 0.0);
    EXPECT_EQ(jakes_psd(-150.0, fd), 0.0);
    EXPECT_TRUE(std::isinf(jakes_psd(fd, fd)));
    EXPECT_THROW(jakes_psd(0.0, 0.0), DomainError);

    const double area = oracle::midpoint([&](double f) { return jakes_psd(f, fd); }, -fd, fd, 10000000);
    EXPECT_NEAR(area, 1.0, 1e-3);
}

TEST(Awgn, ZeroVarianceAndStreams) {
    EXPECT_EQ(frobenius_sq(awgn(3, 4, 0.0, 1, 0)), 0.0);
    EXPECT_THROW(awgn(2, 2, -1.0, 1, 0), DomainError);
    EXPECT_EQ(awgn(2, 2, 0.5, 1, 3), awgn(2, 2, 0.5, 1, 3));
    EXPECT_NE(awgn(2, 2, 0.5, 1, 3), awgn(2, 2, 0.5, 1, 4));
}

TEST(Awgn, SampleVariance) {
    const ComplexMatrix n = awgn(1000, 1000, 0.01, 99, 0);
    const double var = frobenius_sq(n) / 1e6;
    EXPECT_GE(var, 0.0098);
    EXPECT_LE(var, 0.0102);
}

TEST(AvgReceivedPower, HandExpansions) {
    const std::vector<ChannelRealization> one{{ComplexMatrix::identity(2)}};
    EXPECT_DOUBLE_EQ(avg_received_power(one, 4.0), 2.0);

    oracle::Random rng(2);
    ComplexMatrix g(2, 3);
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            g(r, c) = rng.complex();
        }
    }
    const std::vector<ChannelRealization> two{{g}, {Complex(2.0) * g}};
    const double pt = 3.0;
    EXPECT_NEAR(avg_received_power(two, pt), pt / (2.0 * 3 * 2) * 5.0 * frobenius_sq(g), 1e-12);

    const std::vector<ChannelRealization> zeros{{ComplexMatrix(2, 2)}, {ComplexMatrix(2, 2)}};
    EXPECT_EQ(avg_received_power(zeros, 5.0), 0.0);
}

TEST(AvgReceivedPower, ErrorPaths) {
    EXPECT_THROW(avg_received_power({}, 1.0), DomainError);
    const std::vector<ChannelRealization> mixed{{ComplexMatrix(2, 2)}, {ComplexMatrix(2, 3)}};
    EXPECT_THROW(avg_received_power(mixed, 1.0), DomainError);
}
