#pragma once
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pqmc/spin_model.hpp"

namespace pqmc {

class EigensolverFailure : public std::runtime_error {
public:
    EigensolverFailure(int iterations, double residual)
        : std::runtime_error("eigensolver did not converge after " +
                             std::to_string(iterations) + " iterations (residual " +
                             std::to_string(residual) + ")"),
          iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

struct EdOptions {
    int dense_max_spins = 10;   // dense route for 2^N up to this N
    int max_spins = 24;         // hard cap (iterative, matrix-free)
    int basis_cap = 250;        // Lanczos vectors kept before a restart
    int max_restarts = 20;
    double tolerance = 1e-12;   // residual / matrix scale
    std::uint64_t seed = 0x1234;
};

struct EdResult {
    double e0 = 0.0;
    double e1 = 0.0;
    double gap = 0.0;
    int iterations = 0;      // total matrix applications
    double residual = 0.0;   // max residual of the two pairs
};

// Classical energies of all 2^N basis states (the diagonal of H).
std::vector<double> diagonal_energies(const SpinModel& model);

// y = H x, matrix-free: diagonal from the classical energy, -Gamma on every
// single-flip pair.
void apply_hamiltonian(const SpinModel& model, const std::vector<double>& diagonal,
                       const std::vector<double>& in, std::vector<double>& out);

// Two lowest eigenvalues of the 2^N x 2^N Hamiltonian. Dense for small N,
// otherwise restarted Lanczos with full reorthogonalization and deflation.
EdResult exact_diag_gap(const SpinModel& model, const EdOptions& opts = {});

// Ground-state energy and amplitudes (dense route, N <= dense_max_spins).
// Amplitudes are normalized and globally nonnegative.
struct EdGroundState {
    double e0 = 0.0;
    std::vector<double> amplitudes;  // indexed by basis state
};

EdGroundState exact_diag_ground_state(const SpinModel& model, const EdOptions& opts = {});

} // namespace pqmc
