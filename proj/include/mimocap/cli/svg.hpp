#pragma once

#include "mimocap/cli/table.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mimocap::cli {

struct AxisSpec {
    std::string x_column;
    std::vector<std::string> series_columns;
    std::string title;
    std::string x_label;
    std::string y_label;
};

class EmptyPlotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Standalone SVG line plot, one polyline per series column (a lone finite
/// point becomes a circle marker). Non-finite samples are skipped. Output is
/// byte-identical for identical input.
std::string render_svg(const Table& table, const AxisSpec& axes);

} // namespace mimocap::cli
