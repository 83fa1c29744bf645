#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "epiquery/error.hpp"

namespace epiquery::svg {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<double> ticks(double lo, double hi, int target = 5) {
    if (!(hi > lo)) {
        return {lo};
    }
    double raw_step = (hi - lo) / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (mag * m >= raw_step) {
            step = mag * m;
            break;
        }
    }
    std::vector<double> out;
    double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + step * 1e-9; t += step) {
        out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    }
    return out;
}

} // namespace

void write_line_plot(const std::filesystem::path& path, const PlotOptions& options,
                     const std::vector<Series>& series) {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    bool first = true;
    for (const Series& s : series) {
        for (const auto& [x, y] : s.points) {
            if (first) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                first = false;
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (x_hi == x_lo) {
        x_hi = x_lo + 1.0;
    }
    if (y_hi == y_lo) {
        y_hi = y_lo + 1.0;
    }
    double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    const double ml = 62, mr = 18, mt = 40, mb = 48;
    const double pw = options.width - ml - mr;
    const double ph = options.height - mt - mb;
    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double y) { return mt + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::input, "cannot write '" + path.string() + "'");
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
        << "\" height=\"" << options.height << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << options.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-size=\"15\">" << options.title << "</text>\n";

    for (double t : ticks(x_lo, x_hi)) {
        double x = px(t);
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(mt + ph + 18)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(t) << "</text>\n";
    }
    for (double t : ticks(y_lo, y_hi)) {
        double y = py(t);
        out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(ml + pw)
            << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(t) << "</text>\n";
    }
    out << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
        << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << options.width / 2 << "\" y=\"" << options.height - 10
        << "\" text-anchor=\"middle\" font-size=\"12\">" << options.x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << options.height / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << options.height / 2 << ")\">" << options.y_label << "</text>\n";

    int legend_y = 36;
    for (const Series& s : series) {
        if (s.points.empty()) {
            continue;
        }
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& [x, y] : s.points) {
            out << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
        }
        out << "\"/>\n";
        if (s.markers) {
            for (const auto& [x, y] : s.points) {
                out << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
                    << "\" r=\"2.4\" fill=\"" << s.color << "\"/>\n";
            }
        }
        if (!s.label.empty()) {
            out << "<line x1=\"" << fmt(ml + pw - 130) << "\" y1=\"" << legend_y << "\" x2=\""
                << fmt(ml + pw - 108) << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
                << "\" stroke-width=\"1.8\"/>\n";
            out << "<text x=\"" << fmt(ml + pw - 102) << "\" y=\"" << legend_y + 4
                << "\" font-size=\"11\">" << s.label << "</text>\n";
            legend_y += 16;
        }
    }
    out << "</svg>\n";
}

} // namespace epiquery::svg
