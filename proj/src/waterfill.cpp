#include "mimocap/waterfill.hpp"

#include "mimocap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mimocap {

namespace {

constexpr double kTieTolerance = 1e-12;

void require_positive(double value, const char* what, const char* op) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(op, std::string(what) + " must be positive and finite");
    }
}

struct SingleAllocation {
    std::vector<double> alloc;
    double water_level;
};

SingleAllocation solve_single(double total_power, std::span<const double> noise, const char* op) {
    require_positive(total_power, "total power", op);
    if (noise.empty()) {
        throw DomainError(op, "noise vector is empty");
    }
    for (double n : noise) {
        require_positive(n, "noise power", op);
    }

    std::vector<std::size_t> index(noise.size());
    std::iota(index.begin(), index.end(), std::size_t{0});
    std::stable_sort(index.begin(), index.end(), [&](std::size_t a, std::size_t b) { return noise[a] < noise[b]; });

    std::vector<double> prefix(noise.size() + 1, 0.0);
    for (std::size_t i = 0; i < index.size(); ++i) {
        prefix[i + 1] = prefix[i] + noise[index[i]];
    }

    // Shrink the active set from all channels until the weakest active channel
    // sits strictly below the water.
    std::size_t active = noise.size();
    double level = 0.0;
    for (; active >= 1; --active) {
        level = (total_power + prefix[active]) / static_cast<double>(active);
        const double weakest = noise[index[active - 1]];
        if (level - weakest > kTieTolerance * std::max(1.0, std::abs(level))) {
            break;
        }
    }
    // With positive power the single best channel always clears the bar.
    active = std::max<std::size_t>(active, 1);
    level = (total_power + prefix[active]) / static_cast<double>(active);

    SingleAllocation out{std::vector<double>(noise.size(), 0.0), level};
    for (std::size_t i = 0; i < active; ++i) {
        out.alloc[index[i]] = level - noise[index[i]];
    }
    return out;
}

} // namespace

PowerAllocation waterfill(double total_power, std::span<const double> noise) {
    SingleAllocation single = solve_single(total_power, noise, "waterfill");
    return {{std::move(single.alloc)}, {single.water_level}};
}

PowerAllocation waterfill_multi(const WaterfillProblem& problem) {
    constexpr const char* op = "waterfill_multi";
    RealMatrix noise_rows;
    std::vector<double> budgets;

    if (const auto* table = std::get_if<RealMatrix>(&problem.noise)) {
        if (table->empty()) {
            throw ShapeError(op, "noise matrix has no rows");
        }
        const std::size_t width = table->front().size();
        for (const auto& row : *table) {
            if (row.size() != width) {
                throw ShapeError(op, "noise matrix rows have different lengths");
            }
        }
        noise_rows = *table;
        if (const auto* per_row = std::get_if<std::vector<double>>(&problem.total_power)) {
            if (per_row->size() != table->size()) {
                throw ShapeError(op, "total power has " + std::to_string(per_row->size()) +
                                         " entries but noise matrix has " + std::to_string(table->size()) + " rows");
            }
            budgets = *per_row;
        } else {
            budgets.assign(table->size(), std::get<double>(problem.total_power));
        }
    } else {
        const auto& shared = std::get<std::vector<double>>(problem.noise);
        if (const auto* per_row = std::get_if<std::vector<double>>(&problem.total_power)) {
            if (per_row->empty()) {
                throw ShapeError(op, "total power vector is empty");
            }
            budgets = *per_row;
            noise_rows.assign(per_row->size(), shared);
        } else {
            budgets = {std::get<double>(problem.total_power)};
            noise_rows = {shared};
        }
    }

    PowerAllocation out;
    out.alloc.reserve(noise_rows.size());
    out.water_level.reserve(noise_rows.size());
    for (std::size_t s = 0; s < noise_rows.size(); ++s) {
        SingleAllocation single = solve_single(budgets[s], noise_rows[s], op);
        out.alloc.push_back(std::move(single.alloc));
        out.water_level.push_back(single.water_level);
    }
    return out;
}

PowerAllocation waterfill_inverse_gains(double total_power, std::span<const double> squared_singulars) {
    constexpr const char* op = "waterfill_inverse_gains";
    require_positive(total_power, "total power", op);
    if (squared_singulars.empty()) {
        throw DegenerateChannelError(op, "no modes given");
    }
    std::vector<std::size_t> usable;
    std::vector<double> inverse;
    for (std::size_t i = 0; i < squared_singulars.size(); ++i) {
        const double s = squared_singulars[i];
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw DomainError(op, "squared singular values must be finite and nonnegative");
        }
        if (s > 0.0) {
            usable.push_back(i);
            inverse.push_back(1.0 / s);
        }
    }
    if (usable.empty()) {
        throw DegenerateChannelError(op, "all singular values are zero");
    }
    SingleAllocation single = solve_single(total_power, inverse, op);
    std::vector<double> alloc(squared_singulars.size(), 0.0);
    for (std::size_t k = 0; k < usable.size(); ++k) {
        alloc[usable[k]] = single.alloc[k];
    }
    return {{std::move(alloc)}, {single.water_level}};
}

double capacity_from_allocation(const PowerAllocation& alloc, const RealMatrix& gains) {
    constexpr const char* op = "capacity_from_allocation";
    const bool shared = gains.size() == 1;
    if (!shared && gains.size() != alloc.alloc.size()) {
        throw ShapeError(op, "gain table rows do not match subcarriers");
    }
    double total = 0.0;
    for (std::size_t s = 0; s < alloc.alloc.size(); ++s) {
        const auto& row_gain = shared ? gains.front() : gains[s];
        const auto& row_alloc = alloc.alloc[s];
        if (row_gain.size() != row_alloc.size()) {
            throw ShapeError(op, "gain row length does not match channel count");
        }
        for (std::size_t c = 0; c < row_alloc.size(); ++c) {
            if (!(row_gain[c] >= 0.0)) {
                throw DomainError(op, "channel gains must be nonnegative");
            }
            total += std::log2(1.0 + row_alloc[c] * row_gain[c]);
        }
    }
    return total;
}

double capacity_from_allocation(const PowerAllocation& alloc, std::span<const double> gains) {
    return capacity_from_allocation(alloc, RealMatrix{std::vector<double>(gains.begin(), gains.end())});
}

} // namespace mimocap
