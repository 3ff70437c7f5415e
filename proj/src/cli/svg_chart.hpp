#pragma once

#include <string>
#include <utility>
#include <vector>

namespace risid::cli {

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points; // (x, y), drawn in x order
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ChartSeries> series;
};

// Static SVG line chart with axes, ticks and a legend.
std::string render_line_chart(const ChartSpec& chart);

} // namespace risid::cli
