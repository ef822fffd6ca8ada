#pragma once

#include <string>
#include <vector>

namespace eecm {

// Minimal line-chart SVG: one polyline per series over a shared x axis.
struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x;
    std::vector<double> y;
};

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<SvgSeries>& series, int width = 900, int height = 420);

} // namespace eecm
