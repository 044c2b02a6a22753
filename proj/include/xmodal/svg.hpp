#pragma once

#include <string>
#include <utility>
#include <vector>

namespace xmodal {

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Dependency-free line plot: axes, min/max tick labels, one polyline per
// series, small legend. Output is deterministic.
void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace xmodal
