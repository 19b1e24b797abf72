// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace scalekit::cli {

/// Minimal self-contained SVG scatter/line plot on log10 axes. One series
/// per call to add_*; render() returns the document.
class LogLogPlot {
public:
    LogLogPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_points(const std::vector<std::pair<double, double>>& xy, const std::string& color,
                    const std::string& label = {}) {
        series_.push_back({xy, color, label, false});
    }
    void add_line(const std::vector<std::pair<double, double>>& xy, const std::string& color,
                  const std::string& label = {}) {
        series_.push_back({xy, color, label, true});
    }

    /// Plot y on a linear axis instead of log10 (for loss curves).
    void linear_y() { log_y_ = false; }

    std::string render() const;

private:
    struct Series {
        std::vector<std::pair<double, double>> xy;
        std::string color;
        std::string label;
        bool as_line;
    };

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
    bool log_y_ = true;
};

inline std::string LogLogPlot::render() const {
    constexpr double kWidth = 640, kHeight = 440;
    constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto& s : series_) {
        for (const auto& [x, y] : s.xy) {
            const double px = std::log10(x);
            const double py = log_y_ ? std::log10(y) : y;
            if (!std::isfinite(px) || !std::isfinite(py)) continue;
            x_lo = std::min(x_lo, px);
            x_hi = std::max(x_hi, px);
            y_lo = std::min(y_lo, py);
            y_hi = std::max(y_hi, py);
        }
    }
    if (x_lo > x_hi) {
        x_lo = 0;
        x_hi = 1;
        y_lo = 0;
        y_hi = 1;
    }
    const double x_pad = std::max(0.05 * (x_hi - x_lo), 1e-9);
    const double y_pad = std::max(0.05 * (y_hi - y_lo), 1e-9);
    x_lo -= x_pad;
    x_hi += x_pad;
    y_lo -= y_pad;
    y_hi += y_pad;

    auto sx = [&](double x) {
        return kLeft + (std::log10(x) - x_lo) / (x_hi - x_lo) * (kWidth - kLeft - kRight);
    };
    auto sy = [&](double y) {
        const double v = log_y_ ? std::log10(y) : y;
        return kHeight - kBottom - (v - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
    };

    std::string out;
    char buf[512];
    auto emit = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof(buf), fmt, args...);
        out += buf;
    };

    emit("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
         "viewBox=\"0 0 %.0f %.0f\">\n",
         kWidth, kHeight, kWidth, kHeight);
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    emit("<text x=\"%.0f\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
         "text-anchor=\"middle\">%s</text>\n",
         kWidth / 2, title_.c_str());

    // Axes.
    emit("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", kLeft,
         kHeight - kBottom, kWidth - kRight, kHeight - kBottom);
    emit("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", kLeft, kTop,
         kLeft, kHeight - kBottom);
    emit("<text x=\"%.0f\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">%s</text>\n",
         kWidth / 2, kHeight - 12, x_label_.c_str());
    emit("<text x=\"16\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 16 %.0f)\">%s</text>\n",
         kHeight / 2, kHeight / 2, y_label_.c_str());

    // Decade ticks on x; 5 even ticks on y.
    for (int d = static_cast<int>(std::ceil(x_lo)); d <= static_cast<int>(std::floor(x_hi)); ++d) {
        const double px = kLeft + (d - x_lo) / (x_hi - x_lo) * (kWidth - kLeft - kRight);
        emit("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", px,
             kHeight - kBottom, px, kHeight - kBottom + 5);
        emit("<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" "
             "text-anchor=\"middle\">1e%d</text>\n",
             px, kHeight - kBottom + 18, d);
    }
    for (int i = 0; i <= 4; ++i) {
        const double v = y_lo + (y_hi - y_lo) * i / 4.0;
        const double py = kHeight - kBottom - (v - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
        emit("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
             kLeft - 5, py, kLeft, py);
        if (log_y_)
            emit("<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" "
                 "text-anchor=\"end\">1e%.1f</text>\n",
                 kLeft - 8, py + 3, v);
        else
            emit("<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" "
                 "text-anchor=\"end\">%.3g</text>\n",
                 kLeft - 8, py + 3, v);
    }

    // Series and legend.
    double legend_y = kTop + 4;
    for (const auto& s : series_) {
        if (s.as_line) {
            std::string path;
            bool first = true;
            for (const auto& [x, y] : s.xy) {
                std::snprintf(buf, sizeof(buf), "%c%.1f %.1f ", first ? 'M' : 'L', sx(x), sy(y));
                path += buf;
                first = false;
            }
            emit("<path d=\"%s\" fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\"/>\n",
                 path.c_str(), s.color.c_str());
        } else {
            for (const auto& [x, y] : s.xy)
                emit("<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n", sx(x), sy(y),
                     s.color.c_str());
        }
        if (!s.label.empty()) {
            emit("<rect x=\"%.1f\" y=\"%.1f\" width=\"10\" height=\"10\" fill=\"%s\"/>\n",
                 kWidth - 170.0, legend_y, s.color.c_str());
            emit("<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                 "font-size=\"11\">%s</text>\n",
                 kWidth - 155.0, legend_y + 9, s.label.c_str());
            legend_y += 16;
        }
    }
    out += "</svg>\n";
    return out;
}

/// Color cycle for per-budget curves.
inline const char* series_color(std::size_t index) {
    static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return kColors[index % 10];
}

}  // namespace scalekit::cli
