#include "mimocap/capacity.hpp"

#include "mimocap/channel.hpp"
#include "mimocap/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace mimocap {

namespace {

constexpr double kTraceTolerance = 1e-6;
constexpr double kGridMatch = 1e-9;
// Modes weaker than this fraction of the strongest are numerically zero.
constexpr double kModeFloor = 1e-14;

void require_snr(double snr, const char* op) {
    if (!(snr > 0.0) || !std::isfinite(snr)) {
        throw DomainError(op, "SNR must be positive and finite");
    }
}

// log2 det(I + snr G A G^H) for Hermitian PSD A, evaluated on the smaller side so rank-deficient
// products keep their exact unit eigenvalues.
double logdet_shifted(const ComplexMatrix& g, const ComplexMatrix& a, double snr) {
    auto shifted = [snr](ComplexMatrix m) {
        m *= snr;
        m += ComplexMatrix::identity(m.rows());
        return logdet_hpd(m);
    };
    if (g.rows() <= g.cols()) {
        return shifted(matmul(matmul(g, a), adjoint(g)));
    }
    const HermitianEigen e = hermitian_eigen(a);
    ComplexMatrix root(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.cols(); ++k) {
        const double s = std::sqrt(std::max(e.values[k], 0.0));
        for (std::size_t i = 0; i < a.rows(); ++i) {
            root(i, k) = e.vectors(i, k) * s;
        }
    }
    const ComplexMatrix gb = matmul(g, root);
    return shifted(matmul(adjoint(gb), gb));
}

std::size_t grid_index(const CapacityCurve& curve, double at_snr_db, const char* op) {
    for (std::size_t i = 0; i < curve.snr_db.size(); ++i) {
        if (std::abs(curve.snr_db[i] - at_snr_db) <= kGridMatch) {
            return i;
        }
    }
    throw DomainError(op, "SNR " + std::to_string(at_snr_db) + " dB is not on the curve grid");
}

double log2_snr_at(double snr_db, const char* op) {
    const double snr = db_to_linear(snr_db);
    if (!(snr > 1.0)) {
        throw DomainError(op, "SNR must exceed 1 (0 dB) for log2(SNR) > 0");
    }
    return std::log2(snr);
}

} // namespace

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

ImpairmentModel::ImpairmentModel(double kappa_) : kappa(kappa_) {
    if (!(kappa_ >= 0.0) || !std::isfinite(kappa_)) {
        throw DomainError("ImpairmentModel", "kappa must be finite and nonnegative");
    }
}

ComplexMatrix ImpairmentModel::distortion_covariance(const ComplexMatrix& q) const {
    ComplexMatrix y(q.rows(), q.cols());
    for (std::size_t i = 0; i < q.rows(); ++i) {
        y(i, i) = kappa * kappa * q(i, i).real();
    }
    return y;
}

EigenModes eigenmodes(const ComplexMatrix& g) {
    const std::size_t count = std::min(g.rows(), g.cols());
    HermitianEigen eig = hermitian_eigen(matmul(adjoint(g), g));
    const double strongest = std::max(eig.values.front(), 0.0);

    EigenModes modes{std::vector<double>(count), ComplexMatrix(g.cols(), count)};
    for (std::size_t k = 0; k < count; ++k) {
        const double v = eig.values[k];
        modes.gains[k] = v > kModeFloor * strongest ? v : 0.0;
        for (std::size_t r = 0; r < g.cols(); ++r) {
            modes.directions(r, k) = eig.vectors(r, k);
        }
    }
    return modes;
}

IdealSolution ideal_solution(const EigenModes& modes, double snr) {
    require_snr(snr, "ideal_capacity");
    const std::size_t count = modes.gains.size();
    IdealSolution out{0.0, std::vector<double>(count, 0.0), ComplexMatrix(modes.directions.rows(), modes.directions.rows())};

    if (std::all_of(modes.gains.begin(), modes.gains.end(), [](double x) { return x == 0.0; })) {
        // Nothing to gain; any unit-trace input will do.
        std::fill(out.mode_power.begin(), out.mode_power.end(), 1.0 / static_cast<double>(count));
    } else {
        std::vector<double> effective(count);
        for (std::size_t k = 0; k < count; ++k) {
            effective[k] = snr * modes.gains[k];
        }
        const PowerAllocation alloc = waterfill_inverse_gains(1.0, effective);
        out.mode_power = alloc.alloc.front();
        for (std::size_t k = 0; k < count; ++k) {
            out.capacity += std::log2(1.0 + effective[k] * out.mode_power[k]);
        }
    }

    const std::size_t nt = modes.directions.rows();
    for (std::size_t k = 0; k < count; ++k) {
        const double p = out.mode_power[k];
        if (p == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < nt; ++i) {
            const Complex vi = p * modes.directions(i, k);
            for (std::size_t j = 0; j < nt; ++j) {
                out.q(i, j) += vi * std::conj(modes.directions(j, k));
            }
        }
    }
    return out;
}

double ideal_capacity(const ComplexMatrix& g, double snr) {
    require_snr(snr, "ideal_capacity");
    if (frobenius_sq(g) == 0.0) {
        return 0.0;
    }
    return ideal_solution(eigenmodes(g), snr).capacity;
}

double impaired_capacity(const ComplexMatrix& g, double snr, double kappa, const ComplexMatrix& q) {
    constexpr const char* op = "impaired_capacity";
    require_snr(snr, op);
    const ImpairmentModel impairment(kappa);
    if (!q.is_square() || q.rows() != g.cols()) {
        throw ShapeError(op, "input covariance must be " + std::to_string(g.cols()) + "x" + std::to_string(g.cols()));
    }
    if (std::abs(trace_real(q) - 1.0) > kTraceTolerance) {
        throw ConstraintError(op, "input covariance trace " + std::to_string(trace_real(q)) + " is not 1");
    }

    const ComplexMatrix distortion = impairment.distortion_covariance(q);
    const double total = logdet_shifted(g, q + distortion, snr);
    if (impairment.ideal()) {
        return total;
    }
    return total - logdet_shifted(g, distortion, snr);
}

CapacityLimit capacity_limit(std::size_t nt, std::size_t nr, double kappa) {
    if (nt == 0 || nr == 0) {
        throw DomainError("capacity_limit", "antenna counts must be positive");
    }
    if (!(kappa >= 0.0)) {
        throw DomainError("capacity_limit", "kappa must be nonnegative");
    }
    if (kappa == 0.0) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    const double a = static_cast<double>(std::min(nt, nr));
    return {a * std::log2(1.0 + static_cast<double>(nt) / (a * kappa * kappa)), false};
}

void SweepConfig::validate() const {
    constexpr const char* op = "SweepConfig";
    if (n_realizations == 0) {
        throw DomainError(op, "n_realizations must be >= 1");
    }
    if (nt == 0 || nr == 0) {
        throw DomainError(op, "nt and nr must be >= 1");
    }
    if (snr_db_grid.empty()) {
        throw DomainError(op, "snr_db_grid is empty");
    }
    for (std::size_t i = 0; i < snr_db_grid.size(); ++i) {
        if (!std::isfinite(snr_db_grid[i])) {
            throw DomainError(op, "snr_db_grid has a non-finite entry");
        }
        if (i > 0 && !(snr_db_grid[i] > snr_db_grid[i - 1])) {
            throw DomainError(op, "snr_db_grid must be strictly increasing");
        }
    }
    for (double k : kappas) {
        if (!(k >= 0.0) || !std::isfinite(k)) {
            throw DomainError(op, "kappas must be finite and nonnegative");
        }
    }
}

CapacityCurve monte_carlo_sweep(const SweepConfig& cfg, unsigned workers) {
    cfg.validate();
    const std::size_t n = cfg.n_realizations;
    const std::size_t n_snr = cfg.snr_db_grid.size();
    const std::size_t n_kappa = cfg.kappas.size();
    const std::size_t stride = (n_kappa + 1) * n_snr; // ideal row, then one row per kappa

    std::vector<double> snr_linear(n_snr);
    std::transform(cfg.snr_db_grid.begin(), cfg.snr_db_grid.end(), snr_linear.begin(), db_to_linear);

    std::vector<double> samples(n * stride);
    auto evaluate = [&](std::size_t k) {
        const ChannelRealization ch = rayleigh_channel(cfg.nt, cfg.nr, cfg.master_seed, k);
        const EigenModes modes = eigenmodes(ch.g);
        double* out = samples.data() + k * stride;
        for (std::size_t s = 0; s < n_snr; ++s) {
            const IdealSolution ideal = ideal_solution(modes, snr_linear[s]);
            out[s] = ideal.capacity;
            for (std::size_t j = 0; j < n_kappa; ++j) {
                out[(j + 1) * n_snr + s] = impaired_capacity(ch.g, snr_linear[s], cfg.kappas[j], ideal.q);
            }
        }
    };

    workers = std::max(1U, workers);
    if (workers == 1 || n == 1) {
        for (std::size_t k = 0; k < n; ++k) {
            evaluate(k);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> pool;
        const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
        pool.reserve(count);
        for (unsigned w = 0; w < count; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < n; k = next++) {
                    try {
                        evaluate(k);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next = n;
                    }
                }
            });
        }
        pool.clear();
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    // Two-pass mean/std in realization order.
    std::vector<double> mean(stride, 0.0);
    std::vector<double> se(stride, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < stride; ++i) {
            mean[i] += samples[k * stride + i];
        }
    }
    for (double& m : mean) {
        m /= static_cast<double>(n);
    }
    if (n > 1) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < stride; ++i) {
                const double d = samples[k * stride + i] - mean[i];
                se[i] += d * d;
            }
        }
        for (double& v : se) {
            v = std::sqrt(v / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
        }
    }

    CapacityCurve curve;
    curve.nt = cfg.nt;
    curve.nr = cfg.nr;
    curve.n_realizations = n;
    curve.snr_db = cfg.snr_db_grid;
    curve.kappas = cfg.kappas;
    curve.ideal_mean.assign(mean.begin(), mean.begin() + static_cast<std::ptrdiff_t>(n_snr));
    curve.ideal_std_error.assign(se.begin(), se.begin() + static_cast<std::ptrdiff_t>(n_snr));
    for (std::size_t j = 0; j < n_kappa; ++j) {
        const auto first = static_cast<std::ptrdiff_t>((j + 1) * n_snr);
        const auto last = first + static_cast<std::ptrdiff_t>(n_snr);
        curve.mean_capacity.emplace_back(mean.begin() + first, mean.begin() + last);
        curve.std_error.emplace_back(se.begin() + first, se.begin() + last);
        curve.limits.push_back(capacity_limit(cfg.nt, cfg.nr, cfg.kappas[j]));
    }
    return curve;
}

std::vector<double> classic_mux_gain(const CapacityCurve& curve, double at_snr_db) {
    constexpr const char* op = "classic_mux_gain";
    const std::size_t s = grid_index(curve, at_snr_db, op);
    const double denom = log2_snr_at(curve.snr_db[s], op);
    std::vector<double> gains;
    gains.reserve(curve.mean_capacity.size());
    for (const auto& row : curve.mean_capacity) {
        gains.push_back(row[s] / denom);
    }
    return gains;
}

double classic_mux_gain_ideal(const CapacityCurve& curve, double at_snr_db) {
    constexpr const char* op = "classic_mux_gain";
    const std::size_t s = grid_index(curve, at_snr_db, op);
    return curve.ideal_mean[s] / log2_snr_at(curve.snr_db[s], op);
}

RealMatrix finite_snr_mux_gain(const CapacityCurve& mimo, const CapacityCurve& siso) {
    constexpr const char* op = "finite_snr_mux_gain";
    if (mimo.snr_db != siso.snr_db) {
        throw ShapeError(op, "SNR grids differ");
    }
    if (mimo.kappas != siso.kappas) {
        throw ShapeError(op, "kappa lists differ");
    }
    RealMatrix ratio(mimo.mean_capacity.size());
    for (std::size_t j = 0; j < ratio.size(); ++j) {
        ratio[j].resize(mimo.snr_db.size());
        for (std::size_t s = 0; s < mimo.snr_db.size(); ++s) {
            ratio[j][s] = mimo.mean_capacity[j][s] / siso.mean_capacity[j][s];
        }
    }
    return ratio;
}

} // namespace mimocap
