#pragma once

#include <span>
#include <variant>
#include <vector>

namespace mimocap {

/// Row-per-subcarrier real table.
using RealMatrix = std::vector<std::vector<double>>;

/// Total power is a scalar or one entry per subcarrier; noise is one entry per
/// channel or a subcarrier-by-channel table. How the two combine:
///
///   vector power + matrix noise : rows pair up, lengths must agree
///   vector power + vector noise : the noise vector is shared by every subcarrier
///   scalar power + matrix noise : every subcarrier gets the same budget
///   scalar power + vector noise : a single subcarrier
struct WaterfillProblem {
    std::variant<double, std::vector<double>> total_power;
    std::variant<std::vector<double>, RealMatrix> noise;
};

struct PowerAllocation {
    RealMatrix alloc;                ///< subcarrier x channel, all >= 0
    std::vector<double> water_level; ///< per subcarrier
};

/// Exact water-filling over one subcarrier. Channels whose noise sits at the
/// water level (within 1e-12 relative) are left inactive.
PowerAllocation waterfill(double total_power, std::span<const double> noise);

PowerAllocation waterfill_multi(const WaterfillProblem& problem);

/// Eigenmode allocation: water-filling with effective noise 1 / gain. Modes
/// with zero gain get no power; throws DegenerateChannelError when all are zero.
PowerAllocation waterfill_inverse_gains(double total_power, std::span<const double> squared_singulars);

/// sum over subcarriers and channels of log2(1 + alloc * gain), in bit/s/Hz.
/// gains may be one row shared by every subcarrier or a full table.
double capacity_from_allocation(const PowerAllocation& alloc, const RealMatrix& gains);
double capacity_from_allocation(const PowerAllocation& alloc, std::span<const double> gains);

} // namespace mimocap
