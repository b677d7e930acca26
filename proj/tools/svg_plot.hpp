#pragma once

// Minimal hand-rolled SVG scatter/line plot.  Deliberately tiny: the CSV
// output is the machine-readable contract, the SVG is a quick visual sanity
// check, so there is no styling surface beyond per-series color and markers.

#include <string>
#include <vector>

namespace pdcvis_tool {

struct PlotSeries {
    std::string label;
    std::string color;          // SVG color string, e.g. "#1f6fb2"
    bool markers = true;        // draw circles at the data points
    bool line = true;           // connect points in input order
    bool dashed = false;
    std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

// Renders a complete standalone SVG document.  Axis limits are padded data
// bounds; ticks are chosen at round decimal steps.  Output is deterministic
// for identical input.
std::string render_svg(const PlotSpec& spec);

} // namespace pdcvis_tool
