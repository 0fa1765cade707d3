#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace mimocap::cli {

using Cell = std::variant<std::int64_t, double, std::string>;

/// In-memory CSV table. Serialization is byte-stable: doubles use 17
/// significant digits with '.' as decimal separator, lines end in '\n'.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    std::string to_csv() const;

    /// Index of a header entry; throws std::out_of_range if missing.
    std::size_t column(const std::string& name) const;

    /// Numeric value of a cell (integers widen, strings throw).
    double number(std::size_t row, std::size_t col) const;
};

/// "%.17g" in the C locale, with inf/-inf/nan spelled out.
std::string format_number(double value);

} // namespace mimocap::cli
