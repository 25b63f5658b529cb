#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqmc/gwf_spin.hpp"
#include "pqmc/population.hpp"
#include "pqmc/random.hpp"
#include "pqmc/spin_model.hpp"

namespace pqmc {

// The linearized Green function produced a negative stay entry:
// 1 - tau (E_cl - E_T) < 0, meaning the time step is too large.
class NegativeGreenEntry : public std::runtime_error {
public:
    NegativeGreenEntry(double entry, std::uint32_t state)
        : std::runtime_error("negative Green-function entry " + std::to_string(entry) +
                             " at basis state " + std::to_string(state) +
                             " (time step too large)"),
          entry(entry), state(state) {}
    double entry;
    std::uint32_t state;
};

struct GfmcConfig {
    double time_step = 0.05;          // tau (callers usually pick suggested_time_step)
    std::size_t target_walkers = 2000;
    double crossing_fraction = 0.10;  // p
    int hidden_sweeps_per_step = 5;   // uRBM mode
    int hidden_warmup_sweeps = 20;    // hidden equilibration before the clock starts
    double max_time = 1e6;
    double feedback_gain = 0.1;
    double energy_decay_steps = 100.0;
};

struct SpinWalker {
    SpinConfiguration spins;
    HiddenState hidden;          // empty unless the guiding is a uRBM
    std::uint32_t index = 0;     // basis index, kept in sync with spins
    double classical_energy = 0.0;
    int magnetization = 0;
    double weight = 1.0;
};

struct GfmcStepInfo {
    double mean_local_energy = 0.0;  // over the pre-move population
    std::size_t population = 0;
    std::size_t crossed = 0;         // walkers with negative magnetization
};

// Discrete-time Green-function Monte Carlo for the spin models: per step each
// walker either stays or performs one spin flip, with probabilities from the
// linearized Green function, and carries the weight 1 - tau (E_L - E_T) into
// branching.
class GfmcSimulation {
public:
    GfmcSimulation(SpinModel model, SpinGuiding gwf, GfmcConfig cfg, std::uint64_t seed);

    void initialize_all_up();
    GfmcStepInfo step();

    const std::vector<SpinWalker>& walkers() const { return walkers_; }
    double reference_energy() const { return ctrl_.reference_energy; }
    void set_feedback_enabled(bool on) { feedback_ = on; }
    void set_reference_energy(double e) { ctrl_.reference_energy = e; }
    RandomStream& rng() { return rng_; }

    // Monitoring of the Green-function positivity margin.
    double max_tau_energy_product() const { return max_tau_energy_; }

private:
    double ratio(const SpinWalker& w, int site) const;

    SpinModel model_;
    SpinGuiding gwf_;
    GfmcConfig cfg_;
    PopulationControl ctrl_;
    EnergyEstimate estimate_;
    RandomStream rng_;
    std::vector<SpinWalker> walkers_, next_;
    std::vector<double> moveWeights_;
    // fast ratio tables
    std::vector<double> chainRatio_;   // by neighbor sum (chain Boltzmann)
    std::vector<double> hubRatio_;     // by hub alignment sum (shamrock Boltzmann)
    std::vector<double> leafRatio_;    // by (hub, partner) alignment (shamrock Boltzmann)
    std::vector<double> urbmRatio_;    // by (neighbor sum, hidden alignment)
    bool feedback_ = true;
    double max_tau_energy_ = 0.0;
};

struct SpinTunnelingSample {
    enum class Status { Crossed, Censored, Extinct, Exploded, StepTooLarge };
    Status status = Status::Crossed;
    double time = 0.0;
};

// All spins start up; the clock stops when the fraction of walkers with
// negative magnetization first reaches p.
SpinTunnelingSample measure_tunneling_time_spin(const GfmcConfig& cfg,
                                                const SpinGuiding& gwf,
                                                const SpinModel& model,
                                                std::uint64_t seed);

struct SpinEquilibriumEnergy {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
};

SpinEquilibriumEnergy gfmc_equilibrium_energy(const GfmcConfig& cfg, const SpinGuiding& gwf,
                                              const SpinModel& model, std::uint64_t seed,
                                              int burn_in_steps, int measure_steps);

} // namespace pqmc
