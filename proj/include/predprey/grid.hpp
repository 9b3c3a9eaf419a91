#pragma once

#include <stdexcept>
#include <vector>

namespace predprey {

/// Uniform 1-D grid with both endpoints included.
struct Grid1D {
    double x_min = 0.0;
    double x_max = 0.0;
    int n = 0;

    Grid1D() = default;
    Grid1D(double xmin, double xmax, int npts) : x_min(xmin), x_max(xmax), n(npts) {
        if (n < 3) throw std::invalid_argument("Grid1D: need n >= 3");
        if (!(x_max > x_min)) throw std::invalid_argument("Grid1D: need x_max > x_min");
    }

    double dx() const { return (x_max - x_min) / (n - 1); }
    double x(int i) const { return x_min + i * dx(); }
    double center() const { return 0.5 * (x_min + x_max); }
};

/// Snapshot of the three fields at one time.
struct FieldState {
    double t = 0.0;
    std::vector<double> u, v, w;
};

} // namespace predprey
