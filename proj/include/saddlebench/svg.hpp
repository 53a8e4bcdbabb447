#pragma once

#include <string>
#include <vector>

namespace saddlebench {

// One polyline; x coordinates are the indices 0..y.size()-1.
struct SvgSeries {
    std::string label;
    std::vector<double> y;
};

// Self-contained 960x540 line chart (axes, ticks, grid, legend). With
// log10_y the y axis is log-scaled and non-positive points are dropped
// from their polylines. No external tooling; output is deterministic.
std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series,
                              bool log10_y);

}  // namespace saddlebench
