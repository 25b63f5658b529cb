#pragma once
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqmc/random.hpp"

namespace pqmc {

// Raised when a walker population leaves its allowed size band.
// A repetition that throws this must be aborted and reported, never resampled.
class PopulationError : public std::runtime_error {
public:
    enum class Kind { Extinction, Explosion };
    PopulationError(Kind kind, std::size_t size)
        : std::runtime_error(kind == Kind::Extinction
                                 ? "walker population went extinct (size " + std::to_string(size) + ")"
                                 : "walker population exploded (size " + std::to_string(size) + ")"),
          kind(kind), size(size) {}
    Kind kind;
    std::size_t size;
};

// Feedback control of the reference energy that keeps the walker count near
// its target.
struct PopulationControl {
    std::size_t target_size = 1000;   // N_w
    double reference_energy = 0.0;    // E_T
    double gain = 0.1;                // feedback gain (dimensionless)
    double time_step = 0.01;          // tau
};

// Number of copies a walker of weight w produces given a uniform draw r in (0,1).
inline int copy_count(double weight, double r) {
    return static_cast<int>(std::floor(weight + r));
}

// E_T' = best + (gain/tau) * ln(target/current).
inline double update_reference_energy(const PopulationControl& ctrl,
                                      std::size_t current_size,
                                      double best_energy_estimate) {
    if (current_size < 1)
        throw std::invalid_argument("update_reference_energy: empty population");
    return best_energy_estimate +
           (ctrl.gain / ctrl.time_step) *
               std::log(static_cast<double>(ctrl.target_size) / static_cast<double>(current_size));
}

// Stochastic branching: each walker is replaced by floor(w + r) copies with
// weights reset to one. Expected copy count equals the weight. Throws
// PopulationError(Extinction) if every walker dies.
template <class Walker>
std::vector<Walker> branch(const std::vector<Walker>& population, RandomStream& rng) {
    std::vector<Walker> next;
    next.reserve(population.size() + population.size() / 4);
    for (const Walker& w : population) {
        const int copies = copy_count(w.weight, rng.uniform01());
        for (int c = 0; c < copies; ++c) {
            next.push_back(w);
            next.back().weight = 1.0;
        }
    }
    if (next.empty()) throw PopulationError(PopulationError::Kind::Extinction, 0);
    return next;
}

// Aborts the repetition when the population leaves [target/10, 10*target].
inline void check_population_bounds(std::size_t size, std::size_t target) {
    if (size < (target + 9) / 10)
        throw PopulationError(PopulationError::Kind::Extinction, size);
    if (size > 10 * target)
        throw PopulationError(PopulationError::Kind::Explosion, size);
}

// Exponentially weighted running estimate of the ground-state energy, fed by
// the population-mean local energy once per step.
class EnergyEstimate {
public:
    explicit EnergyEstimate(double decay_steps = 100.0) : decay_(decay_steps) {}
    void push(double mean_local_energy) {
        if (!primed_) {
            value_ = mean_local_energy;
            primed_ = true;
        } else {
            value_ += (mean_local_energy - value_) / decay_;
        }
    }
    double value() const { return value_; }
    bool primed() const { return primed_; }

private:
    double decay_;
    double value_ = 0.0;
    bool primed_ = false;
};

} // namespace pqmc
