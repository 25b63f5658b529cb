#include "pqmc/dmc.hpp"

#include <cmath>

#include "pqmc/stats.hpp"

namespace pqmc {

DmcSimulation::DmcSimulation(PotentialSpec pot, GuidingWF1D gwf, DmcConfig cfg,
                             std::uint64_t seed)
    : pot_(pot), gwf_(std::move(gwf)), cfg_(cfg),
      estimate_(cfg.energy_decay_steps), rng_(seed) {
    ctrl_.target_size = cfg_.target_walkers;
    ctrl_.gain = cfg_.feedback_gain;
    ctrl_.time_step = cfg_.time_step;
    walkers_.reserve(2 * cfg_.target_walkers);
    next_.reserve(2 * cfg_.target_walkers);
}

void DmcSimulation::initialize_at(double x) {
    initialize_at(x, gwf_.local_energy(x, pot_));
}

void DmcSimulation::initialize_at(double x, double reference_energy) {
    walkers_.assign(cfg_.target_walkers, x);
    ctrl_.reference_energy = reference_energy;
    estimate_ = EnergyEstimate(cfg_.energy_decay_steps);
    estimate_.push(reference_energy);
    clamped_ = killed_ = 0;
}

DmcStepInfo DmcSimulation::step() {
    const double tau = cfg_.time_step;
    const double sqrtTau = std::sqrt(tau);
    const double eT = ctrl_.reference_energy;
    const bool tabulated = gwf_.mode() == GuidingWF1D::Mode::Tabulated;

    next_.clear();
    double sumE = 0.0;
    std::size_t crossed = 0;
    for (double x : walkers_) {
        double xEval = x;
        if (tabulated && !gwf_.inside_window(x)) {
            ++clamped_;
            xEval = std::min(std::max(x, gwf_.window().xmin), gwf_.window().xmax);
            if (gwf_.log_psi(xEval) < -700.0) {  // absorbing far boundary
                ++killed_;
                continue;
            }
        }
        const double xNew = x + sqrtTau * rng_.gaussian() + tau * gwf_.drift(xEval, pot_);
        double xNewEval = xNew;
        if (tabulated && !gwf_.inside_window(xNew)) {
            ++clamped_;
            xNewEval = std::min(std::max(xNew, gwf_.window().xmin), gwf_.window().xmax);
        }
        const double eL = gwf_.local_energy(xNewEval, pot_);
        sumE += eL;
        const double w = std::exp(-tau * (eL - eT));
        const int copies = copy_count(w, rng_.uniform01());
        for (int c = 0; c < copies; ++c) next_.push_back(xNew);
        if (xNew >= cfg_.threshold) crossed += copies;
    }
    const std::size_t oldSize = walkers_.size();
    walkers_.swap(next_);
    check_population_bounds(walkers_.size(), ctrl_.target_size);

    DmcStepInfo info;
    info.mean_local_energy = sumE / static_cast<double>(oldSize);
    info.population = walkers_.size();
    info.crossed = crossed;
    if (feedback_) {
        estimate_.push(info.mean_local_energy);
        ctrl_.reference_energy =
            update_reference_energy(ctrl_, walkers_.size(), estimate_.value());
    }
    return info;
}

TunnelingSample measure_tunneling_time(const DmcConfig& cfg, const GuidingWF1D& gwf,
                                       const PotentialSpec& pot, std::uint64_t seed) {
    DmcSimulation sim(pot, gwf, cfg, seed);
    sim.initialize_at(pot.left_minimum());
    TunnelingSample out;
    const auto maxSteps =
        static_cast<std::uint64_t>(std::ceil(cfg.max_time / cfg.time_step));
    try {
        for (std::uint64_t s = 1; s <= maxSteps; ++s) {
            const DmcStepInfo info = sim.step();
            if (static_cast<double>(info.crossed) >=
                cfg.crossing_fraction * static_cast<double>(info.population)) {
                out.status = TunnelingSample::Status::Crossed;
                out.time = static_cast<double>(s) * cfg.time_step;
                return out;
            }
        }
        out.status = TunnelingSample::Status::Censored;
        out.time = cfg.max_time;
    } catch (const PopulationError& e) {
        out.status = e.kind == PopulationError::Kind::Extinction
                         ? TunnelingSample::Status::Extinct
                         : TunnelingSample::Status::Exploded;
        out.time = 0.0;
    }
    return out;
}

EquilibriumEnergy dmc_equilibrium_energy(const DmcConfig& cfg, const GuidingWF1D& gwf,
                                         const PotentialSpec& pot, std::uint64_t seed,
                                         int burn_in_steps, int measure_steps) {
    DmcSimulation sim(pot, gwf, cfg, seed);
    sim.initialize_at(pot.left_minimum());
    for (int s = 0; s < burn_in_steps; ++s) sim.step();
    std::vector<double> series;
    series.reserve(measure_steps);
    for (int s = 0; s < measure_steps; ++s) series.push_back(sim.step().mean_local_energy);
    EquilibriumEnergy out;
    blocked_mean_stderr(series, 20, out.mean, out.stderr_of_mean);
    return out;
}

} // namespace pqmc
