#pragma once

// Small self-contained SVG charts.

#include "toposelect/fem2d.hpp"

#include <string>
#include <vector>

namespace toposelect::svg {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool line = true;
    bool markers = false;
    std::string color;  ///< empty picks from the default palette
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 420;
};

/// Axes with ticks, one polyline and/or marker set per series, and a legend.
std::string chart(const std::vector<PlotSeries>& series, const PlotOptions& options);

/// Grayscale image of a density field, black = solid.
std::string density_raster(const fem::Grid& grid, const fem::DensityField& field, int cell = 6);

}  // namespace toposelect::svg
