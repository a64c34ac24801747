#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace twistmodel {

struct PlotSeries {
    std::vector<std::pair<double, double>> points;
};

/// Minimal hand-emitted SVG line chart: axes, tick labels, one polyline
/// per series. Deterministic output for identical input.
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series);

/// Same frame, but each point drawn as a small circle.
void write_scatter_chart(const std::filesystem::path& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series);

}  // namespace twistmodel
