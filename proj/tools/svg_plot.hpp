#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace epiquery::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    std::string color = "#1f6fb2";
    bool markers = false;
};

struct PlotOptions {
    int width = 720;
    int height = 440;
    std::string title;
    std::string x_label;
    std::string y_label;
};

/// Writes a minimal line plot. Output is byte-deterministic for equal input.
void write_line_plot(const std::filesystem::path& path, const PlotOptions& options,
                     const std::vector<Series>& series);

} // namespace epiquery::svg
