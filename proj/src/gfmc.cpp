#include "pqmc/gfmc.hpp"

#include <cmath>

#include "pqmc/stats.hpp"

namespace pqmc {

GfmcSimulation::GfmcSimulation(SpinModel model, SpinGuiding gwf, GfmcConfig cfg,
                               std::uint64_t seed)
    : model_(std::move(model)), gwf_(std::move(gwf)), cfg_(cfg),
      estimate_(cfg.energy_decay_steps), rng_(seed) {
    ctrl_.target_size = cfg_.target_walkers;
    ctrl_.gain = cfg_.feedback_gain;
    ctrl_.time_step = cfg_.time_step;
    moveWeights_.resize(model_.n_spins + 1);

    const int n = model_.n_spins;
    if (gwf_.mode == SpinGuiding::Mode::Boltzmann) {
        if (model_.kind == SpinModel::Kind::Chain) {
            // flip of site i: delta E = 2 J x_i (x_{i-1} + x_{i+1})
            chainRatio_.resize(5);
            for (int a = -2; a <= 2; ++a)
                chainRatio_[a + 2] = std::exp(-gwf_.beta * 2.0 * model_.j * a);
        } else {
            // hub flip: delta E = 2 J x_0 * sum(outer); outer flip:
            // delta E = 2 x_i (J x_0 - (J - eps) x_partner)
            hubRatio_.resize(2 * n + 1);
            for (int s = -n; s <= n; ++s)
                hubRatio_[s + n] = std::exp(-gwf_.beta * 2.0 * model_.j * s);
            leafRatio_.resize(4);
            for (int hub = 0; hub < 2; ++hub)
                for (int partner = 0; partner < 2; ++partner) {
                    const double sHub = hub ? 1.0 : -1.0;
                    const double sPartner = partner ? 1.0 : -1.0;
                    const double dE = 2.0 * (model_.j * sHub -
                                             (model_.j - model_.epsilon) * sPartner);
                    leafRatio_[2 * hub + partner] = std::exp(-gwf_.beta * dE);
                }
        }
    } else if (gwf_.mode == SpinGuiding::Mode::Urbm) {
        if (model_.kind != SpinModel::Kind::Chain)
            throw std::invalid_argument("GfmcSimulation: uRBM guiding is chain-only");
        urbmRatio_.resize(10);
        for (int a = -2; a <= 2; ++a)
            for (int hb = 0; hb < 2; ++hb) {
                const double sH = hb ? 1.0 : -1.0;
                urbmRatio_[2 * (a + 2) + hb] =
                    std::exp(-2.0 * (gwf_.urbm.k1 * a + gwf_.urbm.k3 * sH));
            }
    }
}

// psi_G(x with site flipped) / psi_G(x); uRBM mode uses phi at the walker's
// current hidden state.
double GfmcSimulation::ratio(const SpinWalker& w, int site) const {
    switch (gwf_.mode) {
        case SpinGuiding::Mode::None:
            return 1.0;
        case SpinGuiding::Mode::Boltzmann:
            if (model_.kind == SpinModel::Kind::Chain) {
                const int n = model_.n_spins;
                const int a = w.spins[site] *
                              (w.spins[(site + n - 1) % n] + w.spins[(site + 1) % n]);
                return chainRatio_[a + 2];
            } else {
                if (site == 0) {
                    const int s = w.spins[0] * (w.magnetization - w.spins[0]);
                    return hubRatio_[s + model_.n_spins];
                }
                const int partner = (site % 2 == 1) ? site + 1 : site - 1;
                const int hub = w.spins[site] * w.spins[0] > 0 ? 1 : 0;
                const int par = w.spins[site] * w.spins[partner] > 0 ? 1 : 0;
                return leafRatio_[2 * hub + par];
            }
        case SpinGuiding::Mode::Urbm: {
            const int n = model_.n_spins;
            const int a = w.spins[site] *
                          (w.spins[(site + n - 1) % n] + w.spins[(site + 1) % n]);
            const int hb = w.spins[site] * w.hidden[site] > 0 ? 1 : 0;
            return urbmRatio_[2 * (a + 2) + hb];
        }
        case SpinGuiding::Mode::ExactTable: {
            const auto& amp = *gwf_.amplitudes;
            return amp[w.index ^ (1u << site)] / amp[w.index];
        }
    }
    return 1.0;
}

void GfmcSimulation::initialize_all_up() {
    const int n = model_.n_spins;
    SpinWalker proto;
    proto.spins.assign(n, 1);
    proto.index = (n == 32) ? ~0u : ((1u << n) - 1u);
    proto.classical_energy = classical_energy(model_, proto.spins);
    proto.magnetization = n;
    proto.weight = 1.0;
    if (gwf_.mode == SpinGuiding::Mode::Urbm) {
        proto.hidden.assign(n, 1);
        hidden_metropolis_sweep(gwf_.urbm, proto.spins, proto.hidden, rng_,
                                cfg_.hidden_warmup_sweeps);
    }
    walkers_.assign(cfg_.target_walkers, proto);
    if (gwf_.mode == SpinGuiding::Mode::Urbm) {
        // each walker gets its own equilibrated hidden state
        for (auto& w : walkers_)
            hidden_metropolis_sweep(gwf_.urbm, w.spins, w.hidden, rng_,
                                    cfg_.hidden_warmup_sweeps);
    }
    const double e0 = local_energy_spin(
        gwf_, model_, proto.spins,
        gwf_.mode == SpinGuiding::Mode::Urbm ? &walkers_.front().hidden : nullptr);
    ctrl_.reference_energy = e0;
    estimate_ = EnergyEstimate(cfg_.energy_decay_steps);
    estimate_.push(e0);
    max_tau_energy_ = 0.0;
}

GfmcStepInfo GfmcSimulation::step() {
    const double tau = cfg_.time_step;
    const double eT = ctrl_.reference_energy;
    const double gamma = model_.gamma;
    const int n = model_.n_spins;

    next_.clear();
    next_.reserve(walkers_.size() + walkers_.size() / 4);
    double sumE = 0.0;
    std::size_t crossed = 0;

    for (SpinWalker& w : walkers_) {
        const double stay = 1.0 - tau * (w.classical_energy - eT);
        if (stay < 0.0) throw NegativeGreenEntry(stay, w.index);

        double total = stay;
        double ratioSum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = ratio(w, i);
            ratioSum += r;
            moveWeights_[i] = r;
            total += tau * gamma * r;
        }
        const double eL = w.classical_energy - gamma * ratioSum;
        sumE += eL;
        max_tau_energy_ = std::max(max_tau_energy_, tau * std::fabs(eL - eT));

        // categorical draw over stay + N flips
        double u = rng_.uniform01() * total;
        int move = -1;  // stay
        if (u >= stay) {
            u -= stay;
            for (int i = 0; i < n; ++i) {
                u -= tau * gamma * moveWeights_[i];
                if (u < 0.0) {
                    move = i;
                    break;
                }
            }
            if (move < 0) move = n - 1;  // round-off guard
        }
        if (move >= 0) {
            w.classical_energy += flip_delta(model_, w.spins, move);
            w.spins[move] = static_cast<std::int8_t>(-w.spins[move]);
            w.magnetization += 2 * w.spins[move];
            w.index ^= (1u << move);
        }
        if (gwf_.mode == SpinGuiding::Mode::Urbm)
            hidden_metropolis_sweep(gwf_.urbm, w.spins, w.hidden, rng_,
                                    cfg_.hidden_sweeps_per_step);

        // branching with weight = column sum of the Green function
        const int copies = copy_count(total, rng_.uniform01());
        for (int c = 0; c < copies; ++c) next_.push_back(w);
        if (w.magnetization < 0) crossed += copies;
    }

    const std::size_t oldSize = walkers_.size();
    walkers_.swap(next_);
    check_population_bounds(walkers_.size(), ctrl_.target_size);

    GfmcStepInfo info;
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

SpinTunnelingSample measure_tunneling_time_spin(const GfmcConfig& cfg,
                                                const SpinGuiding& gwf,
                                                const SpinModel& model,
                                                std::uint64_t seed) {
    GfmcSimulation sim(model, gwf, cfg, seed);
    SpinTunnelingSample out;
    const auto maxSteps =
        static_cast<std::uint64_t>(std::ceil(cfg.max_time / cfg.time_step));
    try {
        sim.initialize_all_up();
        for (std::uint64_t s = 1; s <= maxSteps; ++s) {
            const GfmcStepInfo info = sim.step();
            if (static_cast<double>(info.crossed) >=
                cfg.crossing_fraction * static_cast<double>(info.population)) {
                out.status = SpinTunnelingSample::Status::Crossed;
                out.time = static_cast<double>(s) * cfg.time_step;
                return out;
            }
        }
        out.status = SpinTunnelingSample::Status::Censored;
        out.time = cfg.max_time;
    } catch (const PopulationError& e) {
        out.status = e.kind == PopulationError::Kind::Extinction
                         ? SpinTunnelingSample::Status::Extinct
                         : SpinTunnelingSample::Status::Exploded;
    } catch (const NegativeGreenEntry&) {
        out.status = SpinTunnelingSample::Status::StepTooLarge;
    }
    return out;
}

SpinEquilibriumEnergy gfmc_equilibrium_energy(const GfmcConfig& cfg, const SpinGuiding& gwf,
                                              const SpinModel& model, std::uint64_t seed,
                                              int burn_in_steps, int measure_steps) {
    GfmcSimulation sim(model, gwf, cfg, seed);
    sim.initialize_all_up();
    for (int s = 0; s < burn_in_steps; ++s) sim.step();
    std::vector<double> series;
    series.reserve(measure_steps);
    for (int s = 0; s < measure_steps; ++s) series.push_back(sim.step().mean_local_energy);
    SpinEquilibriumEnergy out;
    blocked_mean_stderr(series, 20, out.mean, out.stderr_of_mean);
    return out;
}

} // namespace pqmc
