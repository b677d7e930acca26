#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace pdcvis_tool {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 56.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    std::vector<double> ticks;
};

// Round tick step of the form {1,2,5}*10^k giving 4-8 ticks across the span.
Axis make_axis(double lo, double hi) {
    if (!(hi > lo)) { // degenerate span (single point): pad symmetrically
        const double pad = std::max(1e-12, std::abs(lo) * 0.1 + 0.1);
        lo -= pad;
        hi += pad;
    }
    const double span = hi - lo;
    lo -= 0.05 * span;
    hi += 0.05 * span;
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    Axis ax;
    ax.lo = lo;
    ax.hi = hi;
    for (double t = std::ceil(lo / step) * step; t <= hi + 0.5 * step; t += step)
        ax.ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return ax;
}

} // namespace

std::string render_svg(const PlotSpec& spec) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : spec.series)
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin)) { // no data at all: draw an empty frame
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    const Axis xa = make_axis(xmin, xmax);
    const Axis ya = make_axis(ymin, ymax);

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) {
        return kMarginLeft + (x - xa.lo) / (xa.hi - xa.lo) * plot_w;
    };
    auto py = [&](double y) {
        return kMarginTop + (ya.hi - y) / (ya.hi - ya.lo) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">"
        << spec.title << "</text>\n";

    // frame + ticks + grid
    svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
        << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    for (double t : xa.ticks) {
        const double x = px(t);
        svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << kMarginTop + plot_h
            << "\" x2=\"" << fmt(x) << "\" y2=\"" << kMarginTop + plot_h + 5
            << "\" stroke=\"#333\"/>\n"
            << "<line x1=\"" << fmt(x) << "\" y1=\"" << kMarginTop << "\" x2=\""
            << fmt(x) << "\" y2=\"" << kMarginTop + plot_h
            << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n"
            << "<text x=\"" << fmt(x) << "\" y=\"" << kMarginTop + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << fmt(t) << "</text>\n";
    }
    for (double t : ya.ticks) {
        const double y = py(t);
        svg << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fmt(y) << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << fmt(y) << "\" stroke=\"#333\"/>\n"
            << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(y) << "\" x2=\""
            << kMarginLeft + plot_w << "\" y2=\"" << fmt(y)
            << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n"
            << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(t) << "</text>\n";
    }
    svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << spec.x_label << "</text>\n"
        << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 "
        << kMarginTop + plot_h / 2 << ")\">" << spec.y_label << "</text>\n";

    // series (clip to the frame so reference lines can extend past the data)
    svg << "<clipPath id=\"plot\"><rect x=\"" << kMarginLeft << "\" y=\""
        << kMarginTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\"/></clipPath>\n<g clip-path=\"url(#plot)\">\n";
    for (const auto& s : spec.series) {
        if (s.line && s.points.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.5\"";
            if (s.dashed) svg << " stroke-dasharray=\"6 4\"";
            svg << " points=\"";
            for (const auto& [x, y] : s.points)
                svg << fmt(px(x)) << "," << fmt(py(y)) << " ";
            svg << "\"/>\n";
        }
        if (s.markers)
            for (const auto& [x, y] : s.points)
                svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
                    << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
    svg << "</g>\n";

    // legend, top-right inside the frame
    double ly = kMarginTop + 14.0;
    for (const auto& s : spec.series) {
        const double lx = kMarginLeft + plot_w - 200.0;
        svg << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"";
        if (s.dashed) svg << " stroke-dasharray=\"6 4\"";
        svg << "/>\n<text x=\"" << lx + 28 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
            << "</text>\n";
        ly += 16.0;
    }

    svg << "</svg>\n";
    return svg.str();
}

} // namespace pdcvis_tool
