#include "mmudn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace mmudn {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range padded_range(double lo, double hi) {
    if (!(lo < hi)) {  // degenerate or empty: widen around the value
        double center = std::isfinite(lo) ? lo : 0.0;
        double pad = std::max(1.0, std::abs(center) * 0.1);
        return {center - pad, center + pad};
    }
    double pad = (hi - lo) * 0.06;
    return {lo - pad, hi + pad};
}

std::string number_label(double value) {
    char buffer[32];
    if (value != 0.0 && (std::abs(value) >= 1e5 || std::abs(value) < 1e-3)) {
        std::snprintf(buffer, sizeof(buffer), "%.2e", value);
    } else {
        std::snprintf(buffer, sizeof(buffer), "%.4g", value);
    }
    return buffer;
}

std::string escape_xml(const std::string& text) {
    std::string out;
    out.reserve(text.size());
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

}  // namespace

void write_svg(const LineChart& chart, std::ostream& out) {
    const int width = std::max(chart.width, 240);
    const int height = std::max(chart.height, 180);
    const double left = 64, right = 16, top = 36, bottom = 48;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
    bool any = false;
    for (const ChartSeries& series : chart.series) {
        std::size_t n = std::min(series.x.size(), series.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i])) continue;
            if (!any) {
                min_x = max_x = series.x[i];
                min_y = max_y = series.y[i];
                any = true;
            } else {
                min_x = std::min(min_x, series.x[i]);
                max_x = std::max(max_x, series.x[i]);
                min_y = std::min(min_y, series.y[i]);
                max_y = std::max(max_y, series.y[i]);
            }
        }
    }
    Range xr = padded_range(min_x, max_x);
    Range yr = padded_range(min_y, max_y);

    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) { return top + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
        << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(chart.title)
        << "</text>\n";

    // Axes box and tick grid.
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    const int ticks = 5;
    for (int t = 0; t <= ticks; ++t) {
        double fx = xr.lo + (xr.hi - xr.lo) * t / ticks;
        double fy = yr.lo + (yr.hi - yr.lo) * t / ticks;
        double gx = px(fx), gy = py(fy);
        out << "<line x1=\"" << gx << "\" y1=\"" << top + plot_h << "\" x2=\"" << gx
            << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << gx << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << number_label(fx) << "</text>\n";
        out << "<line x1=\"" << left - 5 << "\" y1=\"" << gy << "\" x2=\"" << left
            << "\" y2=\"" << gy << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << gy + 3
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << number_label(fy) << "</text>\n";
        if (t > 0 && t < ticks) {
            out << "<line x1=\"" << left << "\" y1=\"" << gy << "\" x2=\"" << left + plot_w
                << "\" y2=\"" << gy << "\" stroke=\"#ddd\" stroke-dasharray=\"3,3\"/>\n";
        }
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 8
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(chart.x_label) << "</text>\n";
    out << "<text x=\"14\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 14 " << top + plot_h / 2 << ")\">"
        << escape_xml(chart.y_label) << "</text>\n";

    int color_index = 0;
    double legend_y = top + 12;
    for (const ChartSeries& series : chart.series) {
        const char* color = kPalette[color_index % kPaletteSize];
        ++color_index;
        std::size_t n = std::min(series.x.size(), series.y.size());
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i])) continue;
            out << px(series.x[i]) << ',' << py(series.y[i]) << ' ';
        }
        out << "\"/>\n";
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i])) continue;
            out << "<circle cx=\"" << px(series.x[i]) << "\" cy=\"" << py(series.y[i])
                << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
        }
        out << "<line x1=\"" << left + plot_w - 130 << "\" y1=\"" << legend_y
            << "\" x2=\"" << left + plot_w - 110 << "\" y2=\"" << legend_y
            << "\" stroke=\"" << color << "\" stroke-width=\"1.6\"/>\n";
        out << "<text x=\"" << left + plot_w - 104 << "\" y=\"" << legend_y + 3
            << "\" font-family=\"sans-serif\" font-size=\"10\">"
            << escape_xml(series.label) << "</text>\n";
        legend_y += 14;
    }
    out << "</svg>\n";
}

}  // namespace mmudn
