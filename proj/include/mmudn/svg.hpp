#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmudn {

// Minimal static line-chart writer: axes, ticks, one polyline per series,
// a small legend. Enough to render the campaign figures; nothing more.
struct ChartSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ChartSeries> series;
    int width = 640;
    int height = 420;
};

void write_svg(const LineChart& chart, std::ostream& out);

}  // namespace mmudn
