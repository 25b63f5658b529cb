#include "pqmc/spin_model.hpp"

#include <cmath>

namespace pqmc {
namespace {

void build_adjacency(SpinModel& m) {
    m.adjacency.assign(m.n_spins, {});
    for (const auto& b : m.bonds) {
        m.adjacency[b.a].emplace_back(b.b, b.coupling);
        m.adjacency[b.b].emplace_back(b.a, b.coupling);
    }
}

} // namespace

SpinModel SpinModel::chain(int n, double j, double gamma) {
    if (n < 1) throw std::invalid_argument("chain: need at least one spin");
    SpinModel m;
    m.kind = Kind::Chain;
    m.n_spins = n;
    m.j = j;
    m.gamma = gamma;
    if (n >= 2)
        for (int i = 0; i < n; ++i) m.bonds.push_back({i, (i + 1) % n, -j});
    build_adjacency(m);
    return m;
}

SpinModel SpinModel::shamrock(int leaves, double j, double epsilon, double gamma) {
    if (leaves < 1) throw std::invalid_argument("shamrock: need at least one leaf");
    SpinModel m;
    m.kind = Kind::Shamrock;
    m.n_spins = 2 * leaves + 1;
    m.j = j;
    m.gamma = gamma;
    m.leaves = leaves;
    m.epsilon = epsilon;
    for (int i = 1; i < m.n_spins; ++i) m.bonds.push_back({0, i, -j});
    for (int k = 0; k < leaves; ++k) m.bonds.push_back({2 * k + 1, 2 * k + 2, j - epsilon});
    build_adjacency(m);
    return m;
}

double SpinModel::classical_min() const {
    if (kind == Kind::Chain) return bonds.empty() ? 0.0 : -j * static_cast<double>(bonds.size());
    // All spins aligned: every hub bond satisfied, every leaf bond frustrated.
    return -j * (n_spins - 1) + (j - epsilon) * leaves;
}

double SpinModel::classical_max() const {
    if (kind == Kind::Chain) {
        if (bonds.empty()) return 0.0;
        // Alternating state; one bond stays satisfied when N is odd.
        return n_spins % 2 == 0 ? j * n_spins : j * (n_spins - 2);
    }
    return j * (n_spins - 1) + (j - epsilon) * leaves;
}

double classical_energy(const SpinModel& model, const SpinConfiguration& x) {
    double e = 0.0;
    for (const auto& b : model.bonds)
        e += b.coupling * static_cast<double>(x[b.a]) * static_cast<double>(x[b.b]);
    return e;
}

double flip_delta(const SpinModel& model, const SpinConfiguration& x, int site) {
    double field = 0.0;
    for (const auto& [other, coupling] : model.adjacency[site])
        field += coupling * static_cast<double>(x[other]);
    return -2.0 * static_cast<double>(x[site]) * field;
}

std::vector<std::pair<int, double>> single_flip_neighbors(const SpinModel& model,
                                                          const SpinConfiguration& x) {
    std::vector<std::pair<int, double>> out;
    out.reserve(model.n_spins);
    for (int i = 0; i < model.n_spins; ++i) out.emplace_back(i, flip_delta(model, x, i));
    return out;
}

int magnetization(const SpinConfiguration& x) {
    int m = 0;
    for (auto s : x) m += s;
    return m;
}

SpinConfiguration configuration_from_index(std::uint32_t index, int n) {
    SpinConfiguration x(n);
    for (int i = 0; i < n; ++i) x[i] = (index >> i) & 1u ? 1 : -1;
    return x;
}

std::uint32_t index_from_configuration(const SpinConfiguration& x) {
    std::uint32_t idx = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0) idx |= (1u << i);
    return idx;
}

double suggested_time_step(const SpinModel& model, double safety) {
    const double span = model.classical_max() -
                        (model.classical_min() - model.n_spins * std::fabs(model.gamma));
    const double tau = safety / (span + 4.0);
    return std::min(0.05, tau);
}

} // namespace pqmc
