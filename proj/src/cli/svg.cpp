#include "mimocap/cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mimocap::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 200.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;
constexpr int kTicks = 5;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void widen() {
        if (hi - lo <= 0.0) {
            const double pad = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
            lo -= pad;
            hi += pad;
        }
    }
};

} // namespace

std::string render_svg(const Table& table, const AxisSpec& axes) {
    if (table.rows.empty() || axes.series_columns.empty()) {
        throw EmptyPlotError("render_svg: table has no rows or no series");
    }
    const std::size_t xcol = table.column(axes.x_column);

    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> points;
    };
    std::vector<Series> series;
    Range xr;
    Range yr;
    for (const std::string& name : axes.series_columns) {
        const std::size_t ycol = table.column(name);
        Series s{name, {}};
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const double x = table.number(r, xcol);
            const double y = table.number(r, ycol);
            if (std::isfinite(x) && std::isfinite(y)) {
                s.points.emplace_back(x, y);
                xr.include(x);
                yr.include(y);
            }
        }
        series.push_back(std::move(s));
    }
    if (!std::isfinite(xr.lo)) {
        throw EmptyPlotError("render_svg: no finite points to plot");
    }
    xr.widen();
    yr.widen();

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) { return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth) + "\" height=\"" + fixed(kHeight) +
           "\" viewBox=\"0 0 " + fixed(kWidth) + " " + fixed(kHeight) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"28.00\" text-anchor=\"middle\" font-size=\"16\">" +
           escape(axes.title) + "</text>\n";
    svg += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(plot_w) + "\" height=\"" +
           fixed(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= kTicks; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
        svg += "<line x1=\"" + fixed(px(fx)) + "\" y1=\"" + fixed(kTop + plot_h) + "\" x2=\"" + fixed(px(fx)) +
               "\" y2=\"" + fixed(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fixed(px(fx)) + "\" y=\"" + fixed(kTop + plot_h + 20) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + tick_label(fx) + "</text>\n";
        svg += "<line x1=\"" + fixed(kLeft - 5) + "\" y1=\"" + fixed(py(fy)) + "\" x2=\"" + fixed(kLeft) +
               "\" y2=\"" + fixed(py(fy)) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fixed(kLeft - 8) + "\" y=\"" + fixed(py(fy) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + tick_label(fy) + "</text>\n";
    }
    svg += "<text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"" + fixed(kHeight - 15) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + escape(axes.x_label) + "</text>\n";
    svg += "<text x=\"20.00\" y=\"" + fixed(kTop + plot_h / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20.00 " +
           fixed(kTop + plot_h / 2) + ")\">" + escape(axes.y_label) + "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const Series& s = series[i];
        const char* color = kPalette[i % kPalette.size()];
        if (s.points.size() == 1) {
            svg += "<circle cx=\"" + fixed(px(s.points[0].first)) + "\" cy=\"" + fixed(py(s.points[0].second)) +
                   "\" r=\"4.00\" fill=\"" + color + "\"/>\n";
        } else if (!s.points.empty()) {
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.50\" points=\"";
            for (std::size_t p = 0; p < s.points.size(); ++p) {
                svg += (p ? " " : "") + fixed(px(s.points[p].first)) + "," + fixed(py(s.points[p].second));
            }
            svg += "\"/>\n";
        }
        const double ly = kTop + 15.0 + 18.0 * static_cast<double>(i);
        const double lx = kLeft + plot_w + 15.0;
        svg += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(lx + 20) + "\" y2=\"" + fixed(ly) +
               "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fixed(lx + 26) + "\" y=\"" + fixed(ly + 4) + "\" font-size=\"11\">" + escape(s.name) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace mimocap::cli
