#pragma once
#include <cstdint>
#include <vector>

#include "pqmc/guiding1d.hpp"
#include "pqmc/population.hpp"
#include "pqmc/potential.hpp"
#include "pqmc/random.hpp"

namespace pqmc {

// Protocol parameters of one tunneling measurement.
struct DmcConfig {
    double time_step = 0.01;          // tau
    std::size_t target_walkers = 2000;
    double crossing_fraction = 0.25;  // p
    double threshold = 0.0;           // x_th (absolute position, >= 0)
    double max_time = 1e6;            // censoring cap on the imaginary time
    double feedback_gain = 0.1;       // reference-energy feedback gain
    double energy_decay_steps = 100.0;
};

struct DmcStepInfo {
    double mean_local_energy = 0.0;  // over the pre-branch population
    std::size_t population = 0;      // after branching
    std::size_t crossed = 0;         // walkers at or past the threshold
};

// Walker population for the 1D continuum problem. One instance per
// repetition; stepping is single-threaded and consumes the stream in a fixed
// order, so equal seeds reproduce populations bit for bit.
class DmcSimulation {
public:
    DmcSimulation(PotentialSpec pot, GuidingWF1D gwf, DmcConfig cfg, std::uint64_t seed);

    // All walkers at position x, reference energy anchored to E_L(x).
    void initialize_at(double x);
    void initialize_at(double x, double reference_energy);

    // Drift-diffusion move, branching, then reference-energy feedback.
    DmcStepInfo step();

    const std::vector<double>& walkers() const { return walkers_; }
    double reference_energy() const { return ctrl_.reference_energy; }
    double best_energy_estimate() const { return estimate_.value(); }
    std::size_t clamped_evaluations() const { return clamped_; }
    std::size_t killed_walkers() const { return killed_; }
    void set_feedback_enabled(bool on) { feedback_ = on; }
    RandomStream& rng() { return rng_; }
    const DmcConfig& config() const { return cfg_; }
    const PotentialSpec& potential() const { return pot_; }

private:
    PotentialSpec pot_;
    GuidingWF1D gwf_;
    DmcConfig cfg_;
    PopulationControl ctrl_;
    EnergyEstimate estimate_;
    RandomStream rng_;
    std::vector<double> walkers_, next_;
    std::size_t clamped_ = 0;
    std::size_t killed_ = 0;
    bool feedback_ = true;
};

// One tunneling-time repetition: all walkers start in the left minimum and
// the clock stops when the crossing fraction first reaches p.
struct TunnelingSample {
    enum class Status { Crossed, Censored, Extinct, Exploded };
    Status status = Status::Crossed;
    double time = 0.0;  // imaginary time at the stop (or the cap if censored)
};

TunnelingSample measure_tunneling_time(const DmcConfig& cfg, const GuidingWF1D& gwf,
                                       const PotentialSpec& pot, std::uint64_t seed);

// Equilibrium population-mean local energy with a blocked error bar; used by
// the mixed-estimator checks.
struct EquilibriumEnergy {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
};

EquilibriumEnergy dmc_equilibrium_energy(const DmcConfig& cfg, const GuidingWF1D& gwf,
                                         const PotentialSpec& pot, std::uint64_t seed,
                                         int burn_in_steps, int measure_steps);

} // namespace pqmc
