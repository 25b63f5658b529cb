#pragma once
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pqmc/random.hpp"
#include "pqmc/spin_model.hpp"

namespace pqmc {

using HiddenState = std::vector<std::int8_t>;

// Two-layer ansatz psi_G(x) = sum_h phi(x, h) with
// phi = exp(sum_i K1 x_i x_{i+1} + K2 h_i h_{i+1} + K3 x_i h_i),
// periodic in both layers.
struct Urbm {
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;
    int n = 0;
};

// Change of ln phi from flipping visible spin i at fixed hidden state.
double urbm_log_phi_ratio(const Urbm& u, const SpinConfiguration& x,
                          const HiddenState& h, int site);

// Change of ln phi from flipping hidden spin i at fixed visible state.
double urbm_log_phi_ratio_hidden(const Urbm& u, const SpinConfiguration& x,
                                 const HiddenState& h, int site);

// Full exponent of phi(x, h); brute-force companion to the ratio paths.
double urbm_log_phi(const Urbm& u, const SpinConfiguration& x, const HiddenState& h);

// Single-site Metropolis passes over the hidden layer with stationary
// distribution phi(x, .) at fixed x. Sites are visited in order, so equal
// streams reproduce the walk. Returns the number of accepted flips.
long hidden_metropolis_sweep(const Urbm& u, const SpinConfiguration& x, HiddenState& h,
                             RandomStream& rng, int n_sweeps);

// ln sum_h phi(x, h) by a log-scaled product of 2x2 transfer matrices.
double urbm_log_trace(const Urbm& u, const SpinConfiguration& x);
double urbm_trace(const Urbm& u, const SpinConfiguration& x);

// ln of the wave-function ratio for a single visible flip, exact via the
// transfer trace.
double urbm_log_trace_ratio(const Urbm& u, const SpinConfiguration& x, int site);

// Guiding wave function used by the spin simulator. ExactTable carries
// ground-state amplitudes from exact diagonalization (testing oracle).
struct SpinGuiding {
    enum class Mode { None, Boltzmann, Urbm, ExactTable };
    Mode mode = Mode::None;
    double beta = 0.0;
    Urbm urbm;
    std::shared_ptr<const std::vector<double>> amplitudes;

    static SpinGuiding none() { return {}; }
    static SpinGuiding boltzmann(double beta);
    static SpinGuiding unrestricted_boltzmann_machine(const Urbm& u);
    static SpinGuiding exact_table(std::vector<double> amplitudes);
    std::string label() const;
};

// ln psi_G(x); ExactTable uses the stored amplitudes, Urbm the transfer trace.
double spin_log_psi(const SpinGuiding& gwf, const SpinModel& model,
                    const SpinConfiguration& x);

// Local energy E_cl(x) - Gamma * sum_i psi_G(x^i)/psi_G(x). In uRBM mode the
// ratios use phi at the supplied hidden state (the walker's own), matching
// the joint (x, h) dynamics.
double local_energy_spin(const SpinGuiding& gwf, const SpinModel& model,
                         const SpinConfiguration& x, const HiddenState* h = nullptr);

// Variational energy <psi|H|psi>/<psi|psi> by exact enumeration (N <= 14).
double variational_energy_exact(const SpinGuiding& gwf, const SpinModel& model);

struct SampledEnergy {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    bool noisy = false;  // stderr exceeded the configured bound
};

// Monte Carlo estimate of the variational energy over |psi_G|^2.
SampledEnergy variational_energy_sampled(const SpinGuiding& gwf, const SpinModel& model,
                                         int n_samples, std::uint64_t seed,
                                         double stderr_bound = 1e9);

struct SpinBetaOptimum {
    double beta = 0.0;
    double energy = 0.0;
    bool at_edge = false;
    bool flat = false;  // gradient indistinguishable from noise (SGD route)
    std::vector<double> energy_history;
};

// Boltzmann beta by golden section on the exact enumeration energy (N <= 14)
// or stochastic gradient descent on sampled estimates otherwise.
SpinBetaOptimum optimize_boltzmann_beta_spin(const SpinModel& model,
                                             double beta_lo = 0.005, double beta_hi = 3.0,
                                             std::uint64_t seed = 1);

struct SrOptions {
    int iterations = 200;
    int samples_per_iteration = 5000;
    double learning_rate = 0.05;
    double regularization = 1e-3;  // escalated x10 on solve failure
    int hidden_sweeps = 5;
    double init_k1 = 0.0, init_k2 = 0.0, init_k3 = 0.0;
    std::uint64_t seed = 1;
};

struct SrResult {
    Urbm couplings;
    double energy = 0.0;          // exact enumeration when N <= 14, else sampled
    double energy_stderr = 0.0;   // 0 for the exact route
    int iterations_used = 0;
    int regularization_escalations = 0;
    std::vector<double> energy_history;
};

// Stochastic-reconfiguration optimization of the three uRBM couplings.
// Visible samples follow |psi_G|^2 via a joint walk over (x, h, h'); the two
// hidden chains give conditionally independent log-derivative estimates.
SrResult optimize_urbm(const SpinModel& model, const SrOptions& opts = {});

// Persisted record of an optimized guiding function (consumed by the
// simulator CLI).
struct GwfRecord {
    std::string model_label;
    std::string gwf_kind;
    double beta = 0.0;
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;
    double energy = 0.0;
    double energy_stderr = 0.0;
};

void write_gwf_record(const std::string& path, const GwfRecord& rec);
GwfRecord read_gwf_record(const std::string& path);

} // namespace pqmc
