#ifndef KSLAB_PLOT_HPP
#define KSLAB_PLOT_HPP

#include <span>
#include <string>
#include <vector>

namespace kslab {

struct PlotSeries {
    std::string label;
    std::span<const double> x;
    std::span<const double> y;
};

/// Writes a minimal SVG line plot (axes, tick labels, legend). Plots are
/// derived views; CSV stays the data of record.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series);

} // namespace kslab

#endif
