#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pullback/serialize.hpp"

namespace pullback {

/// Minimal line chart, written directly so no renderer is pulled in.
inline std::string svg_line_plot(const std::vector<std::pair<double, double>>& curve,
                                 const std::string& title, const std::string& x_label,
                                 const std::string& y_label) {
    const int width = 640, height = 400, margin = 56;
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    if (!curve.empty()) {
        x_lo = x_hi = curve.front().first;
        y_lo = y_hi = curve.front().second;
        for (const auto& [x, y] : curve) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_hi = y_lo + 1;

    auto px = [&](double x) {
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin);
    };
    auto py = [&](double y) {
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin);
    };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return std::string(buf);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";

    // Axes.
    svg += "<line x1=\"" + num(margin) + "\" y1=\"" + num(height - margin) + "\" x2=\"" +
           num(width - margin) + "\" y2=\"" + num(height - margin) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(margin) + "\" y1=\"" + num(margin) + "\" x2=\"" + num(margin) +
           "\" y2=\"" + num(height - margin) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
        const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
        svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(height - margin + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
               num(xv) + "</text>\n";
        svg += "<text x=\"" + num(margin - 6) + "\" y=\"" + num(py(yv) + 3) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + num(yv) +
               "</text>\n";
    }
    svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"" + num(height - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + x_label +
           "</text>\n";
    svg += "<text x=\"16\" y=\"" + std::to_string(height / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " + std::to_string(height / 2) + ")\">" + y_label +
           "</text>\n";

    if (!curve.empty()) {
        std::string pts;
        for (const auto& [x, y] : curve) pts += num(px(x)) + "," + num(py(y)) + " ";
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#1f6fb2\" "
               "stroke-width=\"1.5\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace pullback
