#pragma once
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pqmc {

using SpinConfiguration = std::vector<std::int8_t>;  // entries in {-1,+1}

// Transverse-field spin models with a classical (diagonal) bond energy
// E_cl(x) = sum_b c_b x_a x_b and a uniform off-diagonal term -Gamma per
// single spin flip.
//
// Chain: c = -J on the N periodic nearest-neighbor bonds (N = 2 keeps both
// bonds between the same pair; N = 1 has no bonds). Shamrock: a hub spin
// (site 0) couples ferromagnetically (-J) to all 2K outer spins, and the two
// outer spins of each leaf couple antiferromagnetically (+(J - eps)).
struct SpinModel {
    enum class Kind { Chain, Shamrock };

    struct Bond {
        int a = 0, b = 0;
        double coupling = 0.0;  // energy term coupling * x_a * x_b
    };

    Kind kind = Kind::Chain;
    int n_spins = 0;
    double j = 1.0;
    double gamma = 0.0;
    int leaves = 0;       // shamrock only
    double epsilon = 0.0; // shamrock only
    std::vector<Bond> bonds;
    std::vector<std::vector<std::pair<int, double>>> adjacency;  // per-site (other, coupling)

    static SpinModel chain(int n, double j, double gamma);
    static SpinModel shamrock(int leaves, double j, double epsilon, double gamma);

    // Extremes of E_cl over all configurations; used to pick safe time steps.
    double classical_min() const;
    double classical_max() const;
};

double classical_energy(const SpinModel& model, const SpinConfiguration& x);

// Energy change from flipping one spin, O(1) in the local bonds.
double flip_delta(const SpinModel& model, const SpinConfiguration& x, int site);

// All N single-flip moves with their classical energy changes.
std::vector<std::pair<int, double>> single_flip_neighbors(const SpinModel& model,
                                                          const SpinConfiguration& x);

int magnetization(const SpinConfiguration& x);

SpinConfiguration configuration_from_index(std::uint32_t index, int n);
std::uint32_t index_from_configuration(const SpinConfiguration& x);

// Largest time step with 1 - tau (E_cl - E_T) >= 0 for every reachable state,
// assuming the reference energy stays above E_cl_min - n*Gamma. The safety
// factor leaves headroom for feedback transients.
double suggested_time_step(const SpinModel& model, double safety = 0.8);

} // namespace pqmc
