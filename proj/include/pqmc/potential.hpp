#pragma once
#include <cmath>

#include "pqmc/grid.hpp"

namespace pqmc {

// Quartic double well V(x) = x^4/g - x^2, or its plateau variant
// U(x) = y^4/g - y^2 with y = max(0, |x| - x0), which inserts a flat stretch
// of width 2*x0 around the origin. x0 = 0 recovers the quartic well.
struct PotentialSpec {
    enum class Kind { Quartic, Plateau };
    Kind kind = Kind::Quartic;
    double g = 8.0;
    double x0 = 0.0;

    static PotentialSpec quartic(double g) { return {Kind::Quartic, g, 0.0}; }
    static PotentialSpec plateau(double g, double x0) { return {Kind::Plateau, g, x0}; }

    // Right minimum; the left one sits at -right_minimum().
    double right_minimum() const {
        return std::sqrt(g / 2.0) + (kind == Kind::Plateau ? x0 : 0.0);
    }
    double left_minimum() const { return -right_minimum(); }
    double well_depth() const { return -g / 4.0; }

    double value(double x) const {
        const double y = shifted(x);
        return y * y * (y * y / g - 1.0);
    }
    // Derivative; zero on the plateau (subgradient convention at the kink).
    double derivative(double x) const {
        const double y = shifted(x);
        const double d = y * (4.0 * y * y / g - 2.0);
        return (kind == Kind::Plateau && x < 0.0 && y > 0.0) ? -d : d;
    }
    double second_derivative(double x) const {
        const double y = shifted(x);
        if (kind == Kind::Plateau && y == 0.0) return 0.0;
        return 12.0 * y * y / g - 2.0;
    }

private:
    double shifted(double x) const {
        if (kind == Kind::Quartic) return x;
        const double y = std::fabs(x) - x0;
        return y > 0.0 ? y : 0.0;
    }
};

// Default solver grid for a double-well spectrum: wide margins past the
// minima and spacing fine enough for the zero-variance checks downstream.
Grid1D default_spectral_grid(const PotentialSpec& pot, double margin = 6.0,
                             double max_spacing = 0.005);

} // namespace pqmc
