#pragma once

#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace datalens::io {

struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
    bool dashed = false; // reference lines
};

struct SvgChart {
    std::string title, x_label, y_label;
    int width = 760, height = 480;
    std::vector<SvgSeries> series;
    // NaN = derive the bound from the data
    double x_min = std::numeric_limits<double>::quiet_NaN();
    double x_max = std::numeric_limits<double>::quiet_NaN();
    double y_min = std::numeric_limits<double>::quiet_NaN();
    double y_max = std::numeric_limits<double>::quiet_NaN();
};

// Standalone SVG documents, rendered deterministically (fixed palette, fixed
// tick placement, stable number formatting) so identical inputs produce
// byte-identical files.
std::string render_line_chart(const SvgChart& chart);
void write_line_chart(const SvgChart& chart, const std::filesystem::path& path);

std::string render_histogram(const std::string& title, const std::string& x_label,
                             std::span<const double> values, int bins);
void write_histogram(const std::string& title, const std::string& x_label,
                     std::span<const double> values, int bins,
                     const std::filesystem::path& path);

} // namespace datalens::io
