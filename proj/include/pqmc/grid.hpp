#pragma once
#include <cmath>
#include <stdexcept>

namespace pqmc {

// Uniform 1D grid, endpoints included.
struct Grid1D {
    double xmin = -1.0;
    double xmax = 1.0;
    int n_points = 3;

    double spacing() const { return (xmax - xmin) / (n_points - 1); }
    double x(int i) const { return xmin + spacing() * i; }
    int nearest_index(double x) const {
        int i = static_cast<int>(std::lround((x - xmin) / spacing()));
        if (i < 0) i = 0;
        if (i >= n_points) i = n_points - 1;
        return i;
    }
    bool contains(double x) const { return x >= xmin && x <= xmax; }
};

inline Grid1D make_grid(double xmin, double xmax, int n_points) {
    if (!(xmin < xmax) || n_points < 3)
        throw std::invalid_argument("make_grid: need xmin < xmax and at least 3 points");
    return Grid1D{xmin, xmax, n_points};
}

// Symmetric grid covering [-half_width, half_width] with an odd point count,
// so x = 0 is a node and the spacing does not exceed max_spacing.
inline Grid1D make_symmetric_grid(double half_width, double max_spacing) {
    if (half_width <= 0.0 || max_spacing <= 0.0)
        throw std::invalid_argument("make_symmetric_grid: bad arguments");
    const int half_cells = static_cast<int>(std::ceil(half_width / max_spacing));
    return Grid1D{-half_width, half_width, 2 * half_cells + 1};
}

} // namespace pqmc
