#include "pqmc/guiding1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pqmc {

GuidingWF1D GuidingWF1D::boltzmann(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("boltzmann guiding: beta must be positive");
    GuidingWF1D g;
    g.mode_ = Mode::Boltzmann;
    g.beta_ = beta;
    return g;
}

GuidingWF1D GuidingWF1D::tabulated(const SpectralResult& sr, const PotentialSpec& pot,
                                   double rel_cutoff) {
    const Grid1D& grid = sr.grid;
    const int n = grid.n_points;
    double maxPsi = 0.0;
    int iMax = 0;
    for (int i = 0; i < n; ++i)
        if (sr.psi0[i] > maxPsi) {
            maxPsi = sr.psi0[i];
            iMax = i;
        }
    const double cut = rel_cutoff * maxPsi;
    // Largest window around the maximum where psi stays above the cutoff,
    // kept one node away from the grid ends so centered stencils exist.
    int lo = iMax, hi = iMax;
    while (lo - 1 >= 1 && sr.psi0[lo - 1] > cut) --lo;
    while (hi + 1 <= n - 2 && sr.psi0[hi + 1] > cut) ++hi;
    if (hi - lo < 2) throw std::invalid_argument("tabulated guiding: window too narrow");

    GuidingWF1D g;
    g.mode_ = Mode::Tabulated;
    g.e0_ = sr.e0;
    g.window_ = Grid1D{grid.x(lo), grid.x(hi), hi - lo + 1};
    const double h = grid.spacing();
    const int m = hi - lo + 1;
    g.log_psi_.resize(m);
    g.drift_nodes_.resize(m);
    g.local_e_nodes_.resize(m);
    for (int i = lo; i <= hi; ++i) g.log_psi_[i - lo] = std::log(sr.psi0[i]);
    for (int i = lo; i <= hi; ++i) {
        // Stencil neighbors come from the full solve, so the window edges are
        // handled the same as interior nodes.
        const double logC = std::log(sr.psi0[i]);
        const double lp = std::log(sr.psi0[i + 1]) - logC;
        const double lm = std::log(sr.psi0[i - 1]) - logC;
        g.drift_nodes_[i - lo] = (lp - lm) / (2.0 * h);
        // V - psi''/(2 psi) with the same three-point stencil as the
        // eigensolve, so every node reproduces the table's E0 to round-off.
        g.local_e_nodes_[i - lo] = pot.value(grid.x(i)) -
                                   (std::exp(lp) + std::exp(lm) - 2.0) / (2.0 * h * h);
    }
    return g;
}

double GuidingWF1D::lerp(const std::vector<double>& nodes, double x) const {
    const double h = window_.spacing();
    double t = (x - window_.xmin) / h;
    if (t <= 0.0) return nodes.front();
    if (t >= static_cast<double>(nodes.size() - 1)) return nodes.back();
    const int i = static_cast<int>(t);
    const double f = t - i;
    return nodes[i] * (1.0 - f) + nodes[i + 1] * f;
}

double GuidingWF1D::drift(double x, const PotentialSpec& pot) const {
    switch (mode_) {
        case Mode::None: return 0.0;
        case Mode::Boltzmann: return -beta_ * pot.derivative(x);
        case Mode::Tabulated: return lerp(drift_nodes_, x);
    }
    return 0.0;
}

double GuidingWF1D::local_energy(double x, const PotentialSpec& pot) const {
    switch (mode_) {
        case Mode::None:
            return pot.value(x);
        case Mode::Boltzmann: {
            const double vp = pot.derivative(x);
            return pot.value(x) -
                   0.5 * (beta_ * beta_ * vp * vp - beta_ * pot.second_derivative(x));
        }
        case Mode::Tabulated:
            return lerp(local_e_nodes_, x);
    }
    return 0.0;
}

double GuidingWF1D::log_psi(double x) const {
    switch (mode_) {
        case Mode::None: return 0.0;
        case Mode::Boltzmann: throw std::logic_error("log_psi needs the potential in Boltzmann mode");
        case Mode::Tabulated: return lerp(log_psi_, x);
    }
    return 0.0;
}

double boltzmann_variational_energy(const PotentialSpec& pot, const Grid1D& grid,
                                    double beta) {
    // Weights exp(-2 beta (V - Vmin)) keep the quadrature overflow-free.
    const double vMin = pot.well_depth();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        const double v = pot.value(x);
        const double vp = pot.derivative(x);
        const double w = std::exp(-2.0 * beta * (v - vMin)) *
                         ((i == 0 || i == grid.n_points - 1) ? 0.5 : 1.0);
        num += (0.5 * beta * beta * vp * vp + v) * w;
        den += w;
    }
    return num / den;
}

BetaOptimum optimize_boltzmann_beta(const PotentialSpec& pot, const Grid1D& grid,
                                    double beta_lo, double beta_hi) {
    auto energy = [&](double b) { return boltzmann_variational_energy(pot, grid, b); };
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = beta_lo, b = beta_hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = energy(x1), f2 = energy(x2);
    while (b - a > 1e-7 * (1.0 + b)) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = energy(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = energy(x2);
        }
    }
    BetaOptimum out;
    out.beta = 0.5 * (a + b);
    out.energy = energy(out.beta);
    out.at_edge = (out.beta - beta_lo < 1e-4 * (beta_hi - beta_lo)) ||
                  (beta_hi - out.beta < 1e-4 * (beta_hi - beta_lo));
    return out;
}

} // namespace pqmc
