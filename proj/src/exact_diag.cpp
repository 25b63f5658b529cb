#include "pqmc/exact_diag.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "pqmc/random.hpp"

namespace pqmc {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

struct LanczosPair {
    double value = 0.0;
    std::vector<double> vector;
    int applications = 0;
    double residual = 0.0;
};

// Lowest eigenpair by Lanczos with full reorthogonalization against the kept
// basis and the deflation set; restarts from the current Ritz vector when the
// basis cap is hit.
LanczosPair lanczos_lowest(const SpinModel& model, const std::vector<double>& diagonal,
                           const std::vector<std::vector<double>*>& deflate,
                           const EdOptions& opts) {
    const std::size_t dim = diagonal.size();
    const double scale = [&] {
        double m = 0.0;
        for (double d : diagonal) m = std::max(m, std::fabs(d));
        return m + model.n_spins * std::fabs(model.gamma) + 1.0;
    }();

    RandomStream rng(opts.seed);
    std::vector<double> start(dim);
    for (double& x : start) x = rng.uniform01() - 0.5;

    auto project_out = [&](std::vector<double>& v) {
        for (const auto* d : deflate) axpy(-dot(v, *d), *d, v);
    };

    LanczosPair out;
    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        project_out(start);
        double nv = norm(start);
        if (nv < 1e-14) {  // degenerate start; reseed
            for (double& x : start) x = rng.uniform01() - 0.5;
            project_out(start);
            nv = norm(start);
        }
        for (double& x : start) x /= nv;

        std::vector<std::vector<double>> basis;
        basis.push_back(start);
        std::vector<double> alpha, beta;
        std::vector<double> w(dim);

        for (int jstep = 0; jstep < opts.basis_cap; ++jstep) {
            apply_hamiltonian(model, diagonal, basis[jstep], w);
            ++out.applications;
            const double a = dot(w, basis[jstep]);
            alpha.push_back(a);
            axpy(-a, basis[jstep], w);
            if (jstep > 0) axpy(-beta[jstep - 1], basis[jstep - 1], w);
            // full reorthogonalization, two passes
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& q : basis) axpy(-dot(w, q), q, w);
                project_out(w);
            }
            const double b = norm(w);

            // Ritz check on the tridiagonal every few steps.
            const int m = jstep + 1;
            if (m % 10 == 0 || b < 1e-14 * scale || jstep + 1 == opts.basis_cap) {
                Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
                for (int i = 0; i < m; ++i) t(i, i) = alpha[i];
                for (int i = 0; i + 1 < m; ++i) {
                    t(i, i + 1) = beta[i];
                    t(i + 1, i) = beta[i];
                }
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
                const double theta = es.eigenvalues()(0);
                const Eigen::VectorXd s = es.eigenvectors().col(0);
                const double ritzResidual = std::fabs(b * s(m - 1));
                if (ritzResidual < opts.tolerance * scale || b < 1e-14 * scale ||
                    jstep + 1 == opts.basis_cap) {
                    std::vector<double> v(dim, 0.0);
                    for (int i = 0; i < m; ++i) axpy(s(i), basis[i], v);
                    project_out(v);
                    const double nvv = norm(v);
                    for (double& x : v) x /= nvv;
                    // explicit residual ||Hv - theta v||
                    apply_hamiltonian(model, diagonal, v, w);
                    ++out.applications;
                    axpy(-theta, v, w);
                    out.residual = norm(w);
                    out.value = theta;
                    out.vector = std::move(v);
                    if (out.residual < opts.tolerance * scale) return out;
                    break;  // restart from the Ritz vector
                }
            }
            if (b < 1e-14 * scale) break;  // invariant subspace exhausted
            beta.push_back(b);
            for (double& x : w) x /= b;
            basis.push_back(w);
        }
        if (!out.vector.empty() && out.residual < opts.tolerance * scale) return out;
        if (!out.vector.empty()) start = out.vector;
    }
    if (!out.vector.empty() && out.residual < 100.0 * opts.tolerance * scale) return out;
    throw EigensolverFailure(out.applications, out.residual);
}

} // namespace

std::vector<double> diagonal_energies(const SpinModel& model) {
    const std::size_t dim = std::size_t(1) << model.n_spins;
    std::vector<double> diag(dim);
    for (std::size_t b = 0; b < dim; ++b)
        diag[b] = classical_energy(model,
                                   configuration_from_index(static_cast<std::uint32_t>(b),
                                                            model.n_spins));
    return diag;
}

void apply_hamiltonian(const SpinModel& model, const std::vector<double>& diagonal,
                       const std::vector<double>& in, std::vector<double>& out) {
    const std::size_t dim = diagonal.size();
    out.resize(dim);
    const double gamma = model.gamma;
    const int n = model.n_spins;
    for (std::size_t b = 0; b < dim; ++b) {
        double acc = diagonal[b] * in[b];
        for (int i = 0; i < n; ++i) acc -= gamma * in[b ^ (std::size_t(1) << i)];
        out[b] = acc;
    }
}

EdResult exact_diag_gap(const SpinModel& model, const EdOptions& opts) {
    if (model.n_spins > opts.max_spins)
        throw std::invalid_argument("exact_diag_gap: system too large");
    const std::vector<double> diag = diagonal_energies(model);

    if (model.n_spins <= opts.dense_max_spins) {
        const auto dim = static_cast<Eigen::Index>(diag.size());
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index b = 0; b < dim; ++b) {
            h(b, b) = diag[b];
            for (int i = 0; i < model.n_spins; ++i)
                h(b, b ^ (Eigen::Index(1) << i)) = -model.gamma;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        EdResult out;
        out.e0 = es.eigenvalues()(0);
        out.e1 = dim > 1 ? es.eigenvalues()(1) : es.eigenvalues()(0);
        out.gap = out.e1 - out.e0;
        return out;
    }

    LanczosPair p0 = lanczos_lowest(model, diag, {}, opts);
    std::vector<std::vector<double>*> deflate{&p0.vector};
    EdOptions opts1 = opts;
    opts1.seed = opts.seed + 1;
    LanczosPair p1 = lanczos_lowest(model, diag, deflate, opts1);

    EdResult out;
    out.e0 = p0.value;
    out.e1 = p1.value;
    out.gap = out.e1 - out.e0;
    out.iterations = p0.applications + p1.applications;
    out.residual = std::max(p0.residual, p1.residual);
    return out;
}

EdGroundState exact_diag_ground_state(const SpinModel& model, const EdOptions& opts) {
    if (model.n_spins > opts.dense_max_spins)
        throw std::invalid_argument("exact_diag_ground_state: dense route only");
    const std::vector<double> diag = diagonal_energies(model);
    const auto dim = static_cast<Eigen::Index>(diag.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        h(b, b) = diag[b];
        for (int i = 0; i < model.n_spins; ++i)
            h(b, b ^ (Eigen::Index(1) << i)) = -model.gamma;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    EdGroundState out;
    out.e0 = es.eigenvalues()(0);
    out.amplitudes.resize(dim);
    double sum = 0.0;
    for (Eigen::Index b = 0; b < dim; ++b) sum += es.eigenvectors()(b, 0);
    const double sign = sum < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index b = 0; b < dim; ++b)
        out.amplitudes[b] = sign * es.eigenvectors()(b, 0);
    return out;
}

} // namespace pqmc
