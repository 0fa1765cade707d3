#include "mimocap/cli/table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace mimocap::cli {

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    // to_chars is locale independent.
    const auto result = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    if (result.ec != std::errc{}) {
        throw std::runtime_error("format_number: conversion failed");
    }
    return std::string(buf, result.ptr);
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out += (i ? "," : "");
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ',';
            }
            if (const auto* n = std::get_if<std::int64_t>(&row[i])) {
                out += std::to_string(*n);
            } else if (const auto* d = std::get_if<double>(&row[i])) {
                out += format_number(*d);
            } else {
                out += std::get<std::string>(row[i]);
            }
        }
        out += '\n';
    }
    return out;
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw std::out_of_range("no column named '" + name + "'");
}

double Table::number(std::size_t row, std::size_t col) const {
    const Cell& cell = rows.at(row).at(col);
    if (const auto* n = std::get_if<std::int64_t>(&cell)) {
        return static_cast<double>(*n);
    }
    if (const auto* d = std::get_if<double>(&cell)) {
        return *d;
    }
    throw std::invalid_argument("cell is not numeric");
}

} // namespace mimocap::cli
