#pragma once

#include "mimocap/cxkernel.hpp"
#include "mimocap/waterfill.hpp"

#include <cstdint>
#include <vector>

namespace mimocap {

/// Transmitter distortion with error-vector magnitude kappa. The distortion
/// covariance for input covariance Q is kappa^2 * Diag(Q).
struct ImpairmentModel {
    double kappa = 0.0;

    explicit ImpairmentModel(double kappa);

    bool ideal() const noexcept { return kappa == 0.0; }
    ComplexMatrix distortion_covariance(const ComplexMatrix& q) const;
};

/// Right singular directions and squared singular values of one channel,
/// strongest first. Only the min(Nt, Nr) leading modes are kept.
struct EigenModes {
    std::vector<double> gains;
    ComplexMatrix directions; ///< Nt x modes, orthonormal columns
};

EigenModes eigenmodes(const ComplexMatrix& g);

/// Capacity-achieving input for a known channel at one SNR.
struct IdealSolution {
    double capacity = 0.0;           ///< bit/s/Hz
    std::vector<double> mode_power;  ///< sums to 1
    ComplexMatrix q;                 ///< V diag(p) Vᴴ, Nt x Nt, trace 1
};

/// Water-fills unit power over the modes with effective noise 1/(snr * gain).
IdealSolution ideal_solution(const EigenModes& modes, double snr);

/// Ideal-hardware capacity with water-filled input. Zero channel gives 0.
double ideal_capacity(const ComplexMatrix& g, double snr);

/// log2 det(I + snr G Q Gᴴ (snr G Y Gᴴ + I)^-1) with Y = kappa^2 Diag(Q),
/// computed as the difference of two HPD log-determinants. Q must have unit
/// trace within 1e-6 (ConstraintError).
double impaired_capacity(const ComplexMatrix& g, double snr, double kappa, const ComplexMatrix& q);

struct CapacityLimit {
    double value = 0.0;      ///< bit/s/Hz, +inf when unbounded
    bool unbounded = false;  ///< set for ideal hardware (kappa == 0)
};

/// High-SNR ceiling A log2(1 + nt / (A kappa^2)), A = min(nt, nr).
CapacityLimit capacity_limit(std::size_t nt, std::size_t nr, double kappa);

struct SweepConfig {
    std::size_t n_realizations = 1;
    std::size_t nt = 1;
    std::size_t nr = 1;
    std::vector<double> snr_db_grid;
    std::vector<double> kappas;
    std::uint64_t master_seed = 0;

    /// Throws DomainError describing the first violated constraint.
    void validate() const;
};

struct CapacityCurve {
    std::size_t nt = 0;
    std::size_t nr = 0;
    std::size_t n_realizations = 0;
    std::vector<double> snr_db;
    std::vector<double> kappas;
    RealMatrix mean_capacity;          ///< kappa x snr
    RealMatrix std_error;              ///< kappa x snr, sample std / sqrt(n)
    std::vector<CapacityLimit> limits; ///< per kappa
    std::vector<double> ideal_mean;    ///< water-filled ideal hardware, per snr
    std::vector<double> ideal_std_error;
};

/// Averages ideal and impaired capacity over Rayleigh realizations. Realization
/// k is drawn from substream (master_seed, k); the reduction runs in index
/// order, so the result is identical for any worker count.
CapacityCurve monte_carlo_sweep(const SweepConfig& cfg, unsigned workers = 1);

/// C(SNR) / log2(SNR) per kappa at one grid point.
std::vector<double> classic_mux_gain(const CapacityCurve& curve, double at_snr_db);

/// Same ratio for the ideal-hardware row.
double classic_mux_gain_ideal(const CapacityCurve& curve, double at_snr_db);

/// Elementwise MIMO / SISO mean-capacity ratio, kappa x snr.
RealMatrix finite_snr_mux_gain(const CapacityCurve& mimo, const CapacityCurve& siso);

double db_to_linear(double db) noexcept;

} // namespace mimocap
