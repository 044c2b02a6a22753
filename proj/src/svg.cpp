#include "xmodal/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>

#include "xmodal/errors.hpp"

namespace xmodal {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fixed(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series) {
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const PlotSeries& s : series)
        for (const auto& [x, y] : s.points) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    if (!(x_min <= x_max)) throw InvalidConfig("write_svg_plot: no points to plot");
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;

    const double width = 640, height = 440;
    const double left = 64, right = 24, top = 40, bottom = 48;
    auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (width - left - right); };
    auto sy = [&](double y) { return height - bottom - (y - y_min) / (y_max - y_min) * (height - top - bottom); };

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << ' ' << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
        << "</text>\n";

    // axes
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
        << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">"
        << short_num(x_min) << "</text>\n";
    out << "<text x=\"" << width - right << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\">" << short_num(x_max) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << height - bottom << "\" text-anchor=\"end\">"
        << short_num(y_min) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">"
        << short_num(y_max) << "</text>\n";
    out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (top + height - bottom) / 2 << ")\">"
        << y_label << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[i].points) out << fixed(sx(x)) << ',' << fixed(sy(y)) << ' ';
        out << "\"/>\n";
        const double ly = top + 14 * static_cast<double>(i);
        out << "<line x1=\"" << width - right - 120 << "\" y1=\"" << ly << "\" x2=\""
            << width - right - 100 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << width - right - 96 << "\" y=\"" << ly + 4 << "\">" << series[i].name
            << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace xmodal
