#include "datalens/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "datalens/common/error.hpp"

namespace datalens::io {
namespace {

constexpr int kMarginLeft = 64, kMarginRight = 16, kMarginTop = 40, kMarginBottom = 52;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    std::vector<double> ticks;
};

// round tick step to a 1/2/2.5/5 multiple of a power of ten
Axis make_axis(double lo, double hi, int target_ticks) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double raw = (hi - lo) / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = 10.0 * mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    Axis ax;
    ax.lo = lo;
    ax.hi = hi;
    for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step)
        ax.ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return ax;
}

struct Frame {
    int width, height;
    Axis x, y;

    double px(double v) const {
        return kMarginLeft + (v - x.lo) / (x.hi - x.lo) * (width - kMarginLeft - kMarginRight);
    }
    double py(double v) const {
        return height - kMarginBottom -
               (v - y.lo) / (y.hi - y.lo) * (height - kMarginTop - kMarginBottom);
    }
};

void open_document(std::string& s, int width, int height) {
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void draw_frame(std::string& s, const Frame& f, const std::string& title,
                const std::string& x_label, const std::string& y_label) {
    const double x0 = kMarginLeft, x1 = f.width - kMarginRight;
    const double y0 = f.height - kMarginBottom, y1 = kMarginTop;

    for (double t : f.x.ticks) {
        const double px = f.px(t);
        s += "<line x1=\"" + num(px) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(px) + "\" y2=\"" +
             num(y1) + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + num(px) + "\" y=\"" + num(y0 + 18) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
             num(t) + "</text>\n";
    }
    for (double t : f.y.ticks) {
        const double py = f.py(t);
        s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(py) + "\" x2=\"" + num(x1) + "\" y2=\"" +
             num(py) + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(py + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + num(t) +
             "</text>\n";
    }
    s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) +
         "\" height=\"" + num(y0 - y1) + "\" fill=\"none\" stroke=\"#404040\"/>\n";
    s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"22\" font-family=\"sans-serif\" "
         "font-size=\"14\" font-weight=\"bold\" text-anchor=\"middle\">" +
         xml_escape(title) + "</text>\n";
    s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(f.height - 14) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
         xml_escape(x_label) + "</text>\n";
    s += "<text x=\"16\" y=\"" + num((y0 + y1) / 2) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 16 " +
         num((y0 + y1) / 2) + ")\">" + xml_escape(y_label) + "</text>\n";
}

} // namespace

std::string render_line_chart(const SvgChart& chart) {
    require(!chart.series.empty(), Error::Kind::config, "chart needs at least one series");

    double x_lo = chart.x_min, x_hi = chart.x_max, y_lo = chart.y_min, y_hi = chart.y_max;
    const bool fit_x = std::isnan(x_lo) || std::isnan(x_hi);
    const bool fit_y = std::isnan(y_lo) || std::isnan(y_hi);
    if (fit_x) {
        x_lo = std::numeric_limits<double>::infinity();
        x_hi = -x_lo;
    }
    if (fit_y) {
        y_lo = std::numeric_limits<double>::infinity();
        y_hi = -y_lo;
    }
    for (const auto& sr : chart.series) {
        require(sr.x.size() == sr.y.size() && !sr.x.empty(), Error::Kind::config,
                "series \"" + sr.label + "\" needs matching non-empty x/y");
        for (std::size_t i = 0; i < sr.x.size(); ++i) {
            require(std::isfinite(sr.x[i]) && std::isfinite(sr.y[i]), Error::Kind::numeric,
                    "series \"" + sr.label + "\" contains a non-finite point");
            if (fit_x) {
                x_lo = std::min(x_lo, sr.x[i]);
                x_hi = std::max(x_hi, sr.x[i]);
            }
            if (fit_y) {
                y_lo = std::min(y_lo, sr.y[i]);
                y_hi = std::max(y_hi, sr.y[i]);
            }
        }
    }

    Frame f{chart.width, chart.height, make_axis(x_lo, x_hi, 6), make_axis(y_lo, y_hi, 5)};
    std::string s;
    open_document(s, chart.width, chart.height);
    draw_frame(s, f, chart.title, chart.x_label, chart.y_label);

    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& sr = chart.series[k];
        const char* color = kPalette[k % kPaletteSize];
        std::string points;
        for (std::size_t i = 0; i < sr.x.size(); ++i) {
            if (i) points += ' ';
            points += num(f.px(sr.x[i])) + "," + num(f.py(sr.y[i]));
        }
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.8\"" + (sr.dashed ? " stroke-dasharray=\"6 4\"" : "") +
             " points=\"" + points + "\"/>\n";
    }

    // legend, top-right inside the frame
    const double lx = chart.width - kMarginRight - 180;
    double ly = kMarginTop + 14;
    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& sr = chart.series[k];
        const char* color = kPalette[k % kPaletteSize];
        s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 22) +
             "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.8\"" + (sr.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
        s += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(ly) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + xml_escape(sr.label) +
             "</text>\n";
        ly += 15;
    }

    s += "</svg>\n";
    return s;
}

void write_line_chart(const SvgChart& chart, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) fail(Error::Kind::internal, "cannot write " + path.string());
    out << render_line_chart(chart);
    if (!out) fail(Error::Kind::internal, "short write to " + path.string());
}

std::string render_histogram(const std::string& title, const std::string& x_label,
                             std::span<const double> values, int bins) {
    require(!values.empty(), Error::Kind::config, "histogram needs at least one value");
    require(bins >= 1, Error::Kind::config, "histogram needs at least one bin");

    double lo = values[0], hi = values[0];
    for (double v : values) {
        require(std::isfinite(v), Error::Kind::numeric, "histogram value is not finite");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * bins);
        counts[std::min(b, counts.size() - 1)]++;
    }
    const double peak = static_cast<double>(*std::max_element(counts.begin(), counts.end()));

    const int width = 760, height = 480;
    Frame f{width, height, make_axis(lo, hi, 6), make_axis(0.0, peak, 5)};
    std::string s;
    open_document(s, width, height);
    draw_frame(s, f, title, x_label, "count");

    const double bin_w = (hi - lo) / bins;
    for (std::size_t b = 0; b < counts.size(); ++b) {
        if (counts[b] == 0) continue;
        const double x0 = f.px(lo + b * bin_w);
        const double x1 = f.px(lo + (b + 1) * bin_w);
        const double y0 = f.py(0.0);
        const double y1 = f.py(static_cast<double>(counts[b]));
        s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) +
             "\" height=\"" + num(y0 - y1) +
             "\" fill=\"#1f77b4\" fill-opacity=\"0.8\" stroke=\"#10405f\" "
             "stroke-width=\"0.5\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

void write_histogram(const std::string& title, const std::string& x_label,
                     std::span<const double> values, int bins,
                     const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) fail(Error::Kind::internal, "cannot write " + path.string());
    out << render_histogram(title, x_label, values, bins);
    if (!out) fail(Error::Kind::internal, "short write to " + path.string());
}

} // namespace datalens::io
