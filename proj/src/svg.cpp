#include "twistmodel/svg.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace twistmodel {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

struct Frame {
    double x_min, x_max, y_min, y_max;

    double px(double x) const {
        double t = (x - x_min) / (x_max - x_min);
        return kMarginLeft + t * (kWidth - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        double t = (y - y_min) / (y_max - y_min);
        return kHeight - kMarginBottom - t * (kHeight - kMarginTop - kMarginBottom);
    }
};

Frame fit_frame(const std::vector<PlotSeries>& series) {
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (!(x_min <= x_max)) {  // no points at all
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if (x_min == x_max) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_min == y_max) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    double pad_x = 0.04 * (x_max - x_min);
    double pad_y = 0.06 * (y_max - y_min);
    return {x_min - pad_x, x_max + pad_x, y_min - pad_y, y_max + pad_y};
}

std::string tick_label(double v) {
    std::string s = fmt::format("{:.4g}", v);
    return s == "-0" ? "0" : s;
}

void write_chart(const std::filesystem::path& path, const std::string& title,
                 const std::string& x_label, const std::string& y_label,
                 const std::vector<PlotSeries>& series, bool as_points) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plot file: " + path.string());

    Frame frame = fit_frame(series);
    out << fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\">\n",
        kWidth, kHeight, kWidth, kHeight);
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << fmt::format(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">{}</text>\n",
        kWidth / 2, title);

    // axes
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
    out << fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", x0, y0, x1);
    out << fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", x0, y0, y1);

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        double fx = frame.x_min + (frame.x_max - frame.x_min) * i / kTicks;
        double px = frame.px(fx);
        out << fmt::format(
            "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>\n",
            px, y0, y0 + 5);
        out << fmt::format(
            "<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            "font-size=\"11\">{}</text>\n",
            px, y0 + 20, tick_label(fx));

        double fy = frame.y_min + (frame.y_max - frame.y_min) * i / kTicks;
        double py = frame.py(fy);
        out << fmt::format(
            "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n",
            x0 - 5, py, x0);
        out << fmt::format(
            "<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\" font-family=\"sans-serif\" "
            "font-size=\"11\">{}</text>\n",
            x0 - 9, py + 4, tick_label(fy));
    }
    out << fmt::format(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">{}</text>\n",
        (x0 + x1) / 2, kHeight - 12, x_label);
    out << fmt::format(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        (y0 + y1) / 2, (y0 + y1) / 2, y_label);

    for (size_t k = 0; k < series.size(); ++k) {
        const char* color = kSeriesColors[k % 4];
        if (as_points) {
            for (const auto& [x, y] : series[k].points)
                out << fmt::format(
                    "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"{}\"/>\n",
                    frame.px(x), frame.py(y), color);
        } else if (!series[k].points.empty()) {
            out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"",
                               color);
            for (const auto& [x, y] : series[k].points)
                out << fmt::format("{:.2f},{:.2f} ", frame.px(x), frame.py(y));
            out << "\"/>\n";
        }
    }
    out << "</svg>\n";
}

}  // namespace

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series) {
    write_chart(path, title, x_label, y_label, series, false);
}

void write_scatter_chart(const std::filesystem::path& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series) {
    write_chart(path, title, x_label, y_label, series, true);
}

}  // namespace twistmodel
