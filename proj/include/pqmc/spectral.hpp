#pragma once
#include <functional>
#include <stdexcept>
#include <vector>

#include "pqmc/grid.hpp"
#include "pqmc/potential.hpp"

namespace pqmc {

// Raised when the solver grid is too narrow: the eigenstates must have
// amplitude below 1e-8 at both boundaries.
class GridTooSmall : public std::runtime_error {
public:
    explicit GridTooSmall(double boundary_amplitude)
        : std::runtime_error("grid too small: boundary amplitude " +
                             std::to_string(boundary_amplitude)),
          boundary_amplitude(boundary_amplitude) {}
    double boundary_amplitude;
};

class EigenIterationFailure : public std::runtime_error {
public:
    EigenIterationFailure(int iterations, double residual)
        : std::runtime_error("inverse iteration did not converge after " +
                             std::to_string(iterations) +
                             " iterations (residual " + std::to_string(residual) + ")"),
          iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

// Two lowest eigenpairs of -(1/2) d^2/dx^2 + V on a grid, Dirichlet
// boundaries, three-point Laplacian. Wave functions are stored on the full
// grid (zero at the endpoints) and L2-normalized with the grid measure:
// sum(psi_i^2) * spacing = 1. psi0 is globally nonnegative; psi1 is positive
// on the right half.
struct SpectralResult {
    Grid1D grid;
    double e0 = 0.0;
    double e1 = 0.0;
    double gap = 0.0;
    std::vector<double> psi0;
    std::vector<double> psi1;
};

SpectralResult solve_lowest_two(const std::function<double(double)>& potential,
                                const Grid1D& grid);

inline SpectralResult solve_lowest_two(const PotentialSpec& pot, const Grid1D& grid) {
    return solve_lowest_two([&pot](double x) { return pot.value(x); }, grid);
}

// Semiclassical gap of the quartic double well: 8 sqrt(g/pi) exp(-2g/3).
double wkb_gap(double g);

// Classical activation time over a bistable effective barrier:
// 2*pi / sqrt(curv_min * |curv_top|) * exp(2 * barrier).
// Requires curv_min > 0 and curv_top < 0.
double kramers_activation_time(double barrier, double curv_min, double curv_top);

// Profile of the effective potential -ln(psi0): barrier height between the
// left maximum of psi0 and the origin, plus three-point curvatures at both.
struct EffectiveProfile {
    double barrier = 0.0;    // Veff(0) - Veff(x_min)
    double curv_min = 0.0;   // Veff'' at x_min
    double curv_top = 0.0;   // Veff'' at 0
    double x_min = 0.0;      // location of the psi0 maximum at x <= 0
};

EffectiveProfile effective_potential_profile(const SpectralResult& sr);

// Under-barrier amplitude of the single-well ground state by quadrature of
// the classical momentum from the origin to the turning point, plus the
// resulting (uncalibrated) gap estimate psi_r0 * dpsi_r0.
struct SingleWellAmplitude {
    double psi_r0 = 0.0;        // amplitude at the origin
    double dpsi_r0 = 0.0;       // derivative at the origin
    double gap_estimate = 0.0;  // proportional to the true gap
    double turning_point = 0.0;
};

SingleWellAmplitude wkb_single_well_amplitude(const PotentialSpec& pot, double e0,
                                              const Grid1D& grid);

// Export (x, V, psi0, psi1) rows as CSV.
void write_spectrum_csv(const std::string& path, const PotentialSpec& pot,
                        const SpectralResult& sr);

} // namespace pqmc
