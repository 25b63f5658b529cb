#pragma once
#include <vector>

#include "pqmc/grid.hpp"
#include "pqmc/potential.hpp"
#include "pqmc/spectral.hpp"

namespace pqmc {

// Importance-sampling guiding function for the continuum walkers.
// Three modes: no guiding (psi_G = 1), the Boltzmann ansatz
// psi_G = exp(-beta V), and a tabulated numerically exact ground state.
//
// In tabulated mode the log-amplitude table is linearly interpolated;
// drift and local energy are precomputed at the nodes from centered
// differences and interpolated the same way. Evaluations outside the table
// window are clamped to the boundary node (callers count clamps).
class GuidingWF1D {
public:
    enum class Mode { None, Boltzmann, Tabulated };

    GuidingWF1D() : mode_(Mode::None) {}

    static GuidingWF1D none() { return GuidingWF1D(); }
    static GuidingWF1D boltzmann(double beta);
    // Window keeps nodes with psi0 >= rel_cutoff * max(psi0), so the log
    // stays finite and the walker dynamics never sees a node of psi. The
    // nodal local energy (V included) equals the table's E0 to round-off
    // because it reuses the eigensolver's stencil.
    static GuidingWF1D tabulated(const SpectralResult& sr, const PotentialSpec& pot,
                                 double rel_cutoff = 1e-12);

    Mode mode() const { return mode_; }
    double beta() const { return beta_; }
    double table_e0() const { return e0_; }
    const Grid1D& window() const { return window_; }
    bool inside_window(double x) const { return window_.contains(x); }

    double drift(double x, const PotentialSpec& pot) const;
    double local_energy(double x, const PotentialSpec& pot) const;
    double log_psi(double x) const;  // 0 in None mode

private:
    double lerp(const std::vector<double>& nodes, double x) const;

    Mode mode_;
    double beta_ = 0.0;
    // tabulated data
    Grid1D window_{};
    std::vector<double> log_psi_, drift_nodes_, local_e_nodes_;
    double e0_ = 0.0;
};

// Variational energy of the Boltzmann ansatz exp(-beta V) by grid quadrature:
// integral of (psi'^2/2 + V psi^2) over integral of psi^2.
double boltzmann_variational_energy(const PotentialSpec& pot, const Grid1D& grid,
                                    double beta);

struct BetaOptimum {
    double beta = 0.0;
    double energy = 0.0;
    bool at_edge = false;  // minimum landed on an interval endpoint
};

// Golden-section minimum of the variational energy over beta in
// [beta_lo, beta_hi].
BetaOptimum optimize_boltzmann_beta(const PotentialSpec& pot, const Grid1D& grid,
                                    double beta_lo = 0.01, double beta_hi = 10.0);

} // namespace pqmc
