#include "kslab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace kslab {

namespace {

constexpr double W = 720, H = 480;
constexpr double ML = 70, MR = 20, MT = 40, MB = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

} // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series)
{
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (double x : s.x) { xmin = std::min(xmin, x); xmax = std::max(xmax, x); }
        for (double y : s.y) { ymin = std::min(ymin, y); ymax = std::max(ymax, y); }
    }
    if (!(xmax > xmin)) { xmax = xmin + 1.0; }
    if (!(ymax > ymin)) { ymax = ymin + 1.0; ymin -= 1.0; }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ofstream out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' viewBox='0 0 " << W << " " << H << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>"
        << title << "</text>\n";

    // axes with 5 ticks each
    out << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
        << "' stroke='black'/>\n"
        << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
        << "' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + i * (xmax - xmin) / 4.0;
        const double fy = ymin + i * (ymax - ymin) / 4.0;
        out << "<line x1='" << px(fx) << "' y1='" << H - MB << "' x2='" << px(fx) << "' y2='"
            << H - MB + 5 << "' stroke='black'/>\n"
            << "<text x='" << px(fx) << "' y='" << H - MB + 20
            << "' text-anchor='middle' font-size='11'>" << static_cast<float>(fx) << "</text>\n"
            << "<line x1='" << ML - 5 << "' y1='" << py(fy) << "' x2='" << ML << "' y2='"
            << py(fy) << "' stroke='black'/>\n"
            << "<text x='" << ML - 8 << "' y='" << py(fy) + 4
            << "' text-anchor='end' font-size='11'>" << static_cast<float>(fy) << "</text>\n";
    }
    out << "<text x='" << (ML + W - MR) / 2 << "' y='" << H - 12
        << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n"
        << "<text x='16' y='" << (MT + H - MB) / 2
        << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
        << (MT + H - MB) / 2 << ")'>" << ylabel << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kColors[si % 6];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        const size_t n = s.x.size();
        const size_t stride = std::max<size_t>(1, n / 4000);
        for (size_t i = 0; i < n; i += stride) {
            out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        if (n && (n - 1) % stride != 0) out << px(s.x[n - 1]) << "," << py(s.y[n - 1]);
        out << "'/>\n";
        out << "<text x='" << W - MR - 10 << "' y='" << MT + 16 * (si + 1)
            << "' text-anchor='end' font-size='12' fill='" << color << "'>" << s.label
            << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace kslab
