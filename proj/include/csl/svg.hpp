#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "csl/errors.hpp"
#include "csl/matrix.hpp"

namespace csl {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool points_only = false;
};

struct SvgChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgSeries> series;
    int width = 720;
    int height = 480;
};

struct HeatmapGrid {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> x_ticks;
    std::vector<std::string> y_ticks;
    Matrix values{0, 0};
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline const char* series_color(std::size_t i) {
    static const char* palette[] = {"#1f6fb2", "#d1495b", "#3a9d6e", "#8b5fbf",
                                    "#e08a1e", "#4f5d75", "#b0413e", "#1b998b"};
    return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;
};

inline AxisRange axis_range(double lo, double hi) {
    if (!(lo <= hi)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        const double pad = std::abs(lo) > 1e-12 ? std::abs(lo) * 0.1 : 0.5;
        lo -= pad;
        hi += pad;
    }
    return {lo, hi};
}

// Linear blend from blue through white to red over [0, 1].
inline std::string heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    auto channel = [](double a, double b, double f) {
        return static_cast<int>(std::lround(a + (b - a) * f));
    };
    int r, g, b;
    if (t < 0.5) {
        const double f = t / 0.5;
        r = channel(33, 247, f);
        g = channel(102, 247, f);
        b = channel(172, 247, f);
    } else {
        const double f = (t - 0.5) / 0.5;
        r = channel(247, 178, f);
        g = channel(247, 24, f);
        b = channel(247, 43, f);
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

} // namespace detail

inline std::string render_line_svg(const SvgChart& chart) {
    for (const auto& s : chart.series) {
        if (s.x.size() != s.y.size()) {
            throw LengthMismatch("series '" + s.label + "' has " +
                                 std::to_string(s.x.size()) + " x values and " +
                                 std::to_string(s.y.size()) + " y values");
        }
    }
    const double w = chart.width;
    const double h = chart.height;
    const double left = 64, right = 24, top = 40, bottom = 48;
    const double plot_w = w - left - right;
    const double plot_h = h - top - bottom;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : chart.series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    const auto xr = detail::axis_range(xmin, xmax);
    const auto yr = detail::axis_range(ymin, ymax);
    auto sx = [&](double v) { return left + (v - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto sy = [&](double v) { return top + (yr.hi - v) / (yr.hi - yr.lo) * plot_h; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(chart.width) +
           "\" height=\"" + std::to_string(chart.height) + "\" viewBox=\"0 0 " +
           std::to_string(chart.width) + " " + std::to_string(chart.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"" + detail::svg_num(w / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           chart.title + "</text>\n";

    // axes
    out += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(top) +
           "\" x2=\"" + detail::svg_num(left) + "\" y2=\"" + detail::svg_num(top + plot_h) +
           "\" stroke=\"#333\"/>\n";
    out += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(top + plot_h) +
           "\" x2=\"" + detail::svg_num(left + plot_w) + "\" y2=\"" +
           detail::svg_num(top + plot_h) + "\" stroke=\"#333\"/>\n";

    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / ticks;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / ticks;
        const double px = sx(fx);
        const double py = sy(fy);
        out += "<line x1=\"" + detail::svg_num(px) + "\" y1=\"" + detail::svg_num(top + plot_h) +
               "\" x2=\"" + detail::svg_num(px) + "\" y2=\"" +
               detail::svg_num(top + plot_h + 4) + "\" stroke=\"#333\"/>\n";
        out += "<text x=\"" + detail::svg_num(px) + "\" y=\"" +
               detail::svg_num(top + plot_h + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::tick_text(fx) + "</text>\n";
        out += "<line x1=\"" + detail::svg_num(left - 4) + "\" y1=\"" + detail::svg_num(py) +
               "\" x2=\"" + detail::svg_num(left) + "\" y2=\"" + detail::svg_num(py) +
               "\" stroke=\"#333\"/>\n";
        out += "<text x=\"" + detail::svg_num(left - 8) + "\" y=\"" + detail::svg_num(py + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::tick_text(fy) + "</text>\n";
    }
    out += "<text x=\"" + detail::svg_num(left + plot_w / 2) + "\" y=\"" +
           detail::svg_num(h - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           chart.x_label + "</text>\n";
    out += "<text x=\"16\" y=\"" + detail::svg_num(top + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 16 " +
           detail::svg_num(top + plot_h / 2) + ")\">" + chart.y_label + "</text>\n";

    for (std::size_t s = 0; s < chart.series.size(); ++s) {
        const auto& ser = chart.series[s];
        const char* color = detail::series_color(s);
        if (ser.points_only) {
            for (std::size_t i = 0; i < ser.x.size(); ++i) {
                out += "<circle cx=\"" + detail::svg_num(sx(ser.x[i])) + "\" cy=\"" +
                       detail::svg_num(sy(ser.y[i])) + "\" r=\"2.5\" fill=\"" + color +
                       "\"/>\n";
            }
        } else if (!ser.x.empty()) {
            out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"2\" points=\"";
            for (std::size_t i = 0; i < ser.x.size(); ++i) {
                out += detail::svg_num(sx(ser.x[i])) + "," + detail::svg_num(sy(ser.y[i]));
                if (i + 1 < ser.x.size()) {
                    out += " ";
                }
            }
            out += "\"/>\n";
        }
        const double ly = top + 16.0 * static_cast<double>(s);
        out += "<rect x=\"" + detail::svg_num(left + plot_w - 150) + "\" y=\"" +
               detail::svg_num(ly) + "\" width=\"12\" height=\"4\" fill=\"" + color +
               "\"/>\n";
        out += "<text x=\"" + detail::svg_num(left + plot_w - 132) + "\" y=\"" +
               detail::svg_num(ly + 6) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + ser.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

inline std::string render_heatmap_svg(const HeatmapGrid& grid) {
    const std::size_t rows = grid.values.rows();
    const std::size_t cols = grid.values.cols();
    if (rows == 0 || cols == 0) {
        throw InvalidConfig("heatmap needs a non-empty value grid");
    }
    if (grid.x_ticks.size() != cols || grid.y_ticks.size() != rows) {
        throw LengthMismatch("heatmap tick labels must match the grid shape");
    }
    double vmin = grid.values(0, 0), vmax = vmin;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            vmin = std::min(vmin, grid.values(r, c));
            vmax = std::max(vmax, grid.values(r, c));
        }
    }
    const auto vr = detail::axis_range(vmin, vmax);

    const double cell = 64;
    const double left = 88, top = 56, bottom = 56, right = 96;
    const double w = left + cell * static_cast<double>(cols) + right;
    const double h = top + cell * static_cast<double>(rows) + bottom;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(w) +
           "\" height=\"" + detail::svg_num(h) + "\" viewBox=\"0 0 " + detail::svg_num(w) +
           " " + detail::svg_num(h) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"" + detail::svg_num(w / 2) +
           "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           grid.title + "</text>\n";

    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = grid.values(r, c);
            const double t = (v - vr.lo) / (vr.hi - vr.lo);
            const double x = left + cell * static_cast<double>(c);
            const double y = top + cell * static_cast<double>(r);
            out += "<rect class=\"cell\" x=\"" + detail::svg_num(x) + "\" y=\"" +
                   detail::svg_num(y) + "\" width=\"" + detail::svg_num(cell) +
                   "\" height=\"" + detail::svg_num(cell) + "\" fill=\"" +
                   detail::heat_color(t) + "\" stroke=\"#ffffff\"/>\n";
            out += "<text x=\"" + detail::svg_num(x + cell / 2) + "\" y=\"" +
                   detail::svg_num(y + cell / 2 + 4) +
                   "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
                   detail::tick_text(v) + "</text>\n";
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        out += "<text x=\"" + detail::svg_num(left + cell * (static_cast<double>(c) + 0.5)) +
               "\" y=\"" + detail::svg_num(top + cell * static_cast<double>(rows) + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               grid.x_ticks[c] + "</text>\n";
    }
    for (std::size_t r = 0; r < rows; ++r) {
        out += "<text x=\"" + detail::svg_num(left - 8) + "\" y=\"" +
               detail::svg_num(top + cell * (static_cast<double>(r) + 0.5) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               grid.y_ticks[r] + "</text>\n";
    }
    out += "<text x=\"" + detail::svg_num(left + cell * static_cast<double>(cols) / 2) +
           "\" y=\"" + detail::svg_num(h - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           grid.x_label + "</text>\n";
    out += "<text x=\"20\" y=\"" +
           detail::svg_num(top + cell * static_cast<double>(rows) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 20 " +
           detail::svg_num(top + cell * static_cast<double>(rows) / 2) + ")\">" +
           grid.y_label + "</text>\n";

    // color legend
    const double lx = left + cell * static_cast<double>(cols) + 24;
    const int steps = 24;
    const double lh = cell * static_cast<double>(rows);
    for (int i = 0; i < steps; ++i) {
        const double t = 1.0 - (static_cast<double>(i) + 0.5) / steps;
        out += "<rect x=\"" + detail::svg_num(lx) + "\" y=\"" +
               detail::svg_num(top + lh * i / steps) + "\" width=\"16\" height=\"" +
               detail::svg_num(lh / steps + 0.5) + "\" fill=\"" + detail::heat_color(t) +
               "\"/>\n";
    }
    out += "<text x=\"" + detail::svg_num(lx + 20) + "\" y=\"" + detail::svg_num(top + 8) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::tick_text(vr.hi) +
           "</text>\n";
    out += "<text x=\"" + detail::svg_num(lx + 20) + "\" y=\"" + detail::svg_num(top + lh) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::tick_text(vr.lo) +
           "</text>\n";
    out += "</svg>\n";
    return out;
}

inline void write_svg(const std::string& svg, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoFailure("cannot open '" + path + "' for writing");
    }
    out << svg;
    if (!out.good()) {
        throw IoFailure("failed writing '" + path + "'");
    }
}

} // namespace csl
