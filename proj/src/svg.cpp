#include "saddlebench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace saddlebench {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

constexpr double kWidth = 960.0, kHeight = 540.0;
constexpr double kLeft = 72.0, kRight = 930.0;
constexpr double kTop = 48.0, kBottom = 486.0;

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void escape_into(std::string& out, const std::string& s) {
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
}

}  // namespace

std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series,
                              bool log10_y) {
    std::size_t max_len = 1;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    for (const SvgSeries& s : series) {
        max_len = std::max(max_len, s.y.size());
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            if (log10_y && v <= 0.0) continue;
            const double t = log10_y ? std::log10(v) : v;
            ymin = std::min(ymin, t);
            ymax = std::max(ymax, t);
        }
    }
    if (!(ymin <= ymax)) {
        ymin = log10_y ? -1.0 : 0.0;
        ymax = log10_y ? 1.0 : 1.0;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 1.0;
        ymax += 1.0;
    } else {
        const double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }
    const double xmax = static_cast<double>(max_len > 1 ? max_len - 1 : 1);

    const auto sx = [&](double x) {
        return kLeft + (kRight - kLeft) * (x / xmax);
    };
    const auto sy = [&](double t) {
        return kBottom - (kBottom - kTop) * ((t - ymin) / (ymax - ymin));
    };

    std::string out;
    out +=
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" "
        "height=\"540\" viewBox=\"0 0 960 540\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" "
           "fill=\"white\"/>\n";

    // Axis ticks and grid.
    out += "<g font-family=\"sans-serif\" font-size=\"13\" fill=\"#333\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xmax * i / 5.0;
        const double px = sx(xv);
        out += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
               num(px) + "\" y2=\"" + num(kBottom) +
               "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + num(px) + "\" y=\"" + num(kBottom + 20.0) +
               "\" text-anchor=\"middle\">" + tick_label(std::round(xv)) +
               "</text>\n";
    }
    // Log axes tick at integer decades when they fit, else even spacing.
    std::vector<double> yticks;
    if (log10_y) {
        const int lo = static_cast<int>(std::ceil(ymin));
        const int hi = static_cast<int>(std::floor(ymax));
        const int span = hi - lo;
        const int step = span > 7 ? (span + 6) / 7 : 1;
        for (int d = lo; d <= hi; d += step) {
            yticks.push_back(static_cast<double>(d));
        }
        if (yticks.empty()) yticks = {0.5 * (ymin + ymax)};
    } else {
        for (int i = 0; i <= 5; ++i) {
            yticks.push_back(ymin + (ymax - ymin) * i / 5.0);
        }
    }
    for (double t : yticks) {
        const double py = sy(t);
        out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py) + "\" x2=\"" +
               num(kRight) + "\" y2=\"" + num(py) +
               "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        const std::string label =
            log10_y ? ("1e" + tick_label(t)) : tick_label(t);
        out += "<text x=\"" + num(kLeft - 8.0) + "\" y=\"" + num(py + 4.0) +
               "\" text-anchor=\"end\">" + label + "</text>\n";
    }
    out += "</g>\n";

    // Frame.
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
           num(kRight - kLeft) + "\" height=\"" + num(kBottom - kTop) +
           "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

    // Series polylines; in log mode non-positive points are dropped.
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % kPaletteSize];
        std::string pts;
        for (std::size_t i = 0; i < series[k].y.size(); ++i) {
            const double v = series[k].y[i];
            if (!std::isfinite(v)) continue;
            if (log10_y && v <= 0.0) continue;
            const double t = log10_y ? std::log10(v) : v;
            pts += num(sx(static_cast<double>(i))) + "," + num(sy(t)) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }

    // Title and axis labels.
    out += "<g font-family=\"sans-serif\" fill=\"#111\">\n";
    out += "<text x=\"480\" y=\"26\" font-size=\"17\" "
           "text-anchor=\"middle\">";
    escape_into(out, title);
    out += "</text>\n";
    out += "<text x=\"" + num(0.5 * (kLeft + kRight)) + "\" y=\"528\" "
           "font-size=\"14\" text-anchor=\"middle\">";
    escape_into(out, x_label);
    out += "</text>\n";
    out += "<text x=\"20\" y=\"" + num(0.5 * (kTop + kBottom)) +
           "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 "
           "20 " +
           num(0.5 * (kTop + kBottom)) + ")\">";
    escape_into(out, y_label);
    out += "</text>\n";
    out += "</g>\n";

    // Legend, top right inside the frame.
    const double lx = kRight - 180.0;
    double ly = kTop + 16.0;
    out += "<g font-family=\"sans-serif\" font-size=\"13\" fill=\"#111\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % kPaletteSize];
        out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4.0) +
               "\" x2=\"" + num(lx + 26.0) + "\" y2=\"" + num(ly - 4.0) +
               "\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(lx + 32.0) + "\" y=\"" + num(ly) + "\">";
        escape_into(out, series[k].label);
        out += "</text>\n";
        ly += 18.0;
    }
    out += "</g>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace saddlebench
