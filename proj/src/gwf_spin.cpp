#include "pqmc/gwf_spin.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pqmc/stats.hpp"

namespace pqmc {
namespace {

inline int wrap(int i, int n) { return (i % n + n) % n; }

double spin_log_psi_ratio_flip(const SpinGuiding& gwf, const SpinModel& model,
                               const SpinConfiguration& x, int site) {
    switch (gwf.mode) {
        case SpinGuiding::Mode::None:
            return 0.0;
        case SpinGuiding::Mode::Boltzmann:
            return -gwf.beta * flip_delta(model, x, site);
        case SpinGuiding::Mode::Urbm:
            return urbm_log_trace_ratio(gwf.urbm, x, site);
        case SpinGuiding::Mode::ExactTable: {
            const std::uint32_t idx = index_from_configuration(x);
            return std::log((*gwf.amplitudes)[idx ^ (1u << site)]) -
                   std::log((*gwf.amplitudes)[idx]);
        }
    }
    return 0.0;
}

} // namespace

double urbm_log_phi_ratio(const Urbm& u, const SpinConfiguration& x,
                          const HiddenState& h, int site) {
    const int n = u.n;
    const double neighbors = static_cast<double>(x[wrap(site - 1, n)]) +
                             static_cast<double>(x[wrap(site + 1, n)]);
    return -2.0 * static_cast<double>(x[site]) *
           (u.k1 * neighbors + u.k3 * static_cast<double>(h[site]));
}

double urbm_log_phi_ratio_hidden(const Urbm& u, const SpinConfiguration& x,
                                 const HiddenState& h, int site) {
    const int n = u.n;
    const double neighbors = static_cast<double>(h[wrap(site - 1, n)]) +
                             static_cast<double>(h[wrap(site + 1, n)]);
    return -2.0 * static_cast<double>(h[site]) *
           (u.k2 * neighbors + u.k3 * static_cast<double>(x[site]));
}

double urbm_log_phi(const Urbm& u, const SpinConfiguration& x, const HiddenState& h) {
    double s = 0.0;
    for (int i = 0; i < u.n; ++i) {
        const int ip = wrap(i + 1, u.n);
        s += u.k1 * x[i] * x[ip] + u.k2 * h[i] * h[ip] + u.k3 * x[i] * h[i];
    }
    return s;
}

long hidden_metropolis_sweep(const Urbm& u, const SpinConfiguration& x, HiddenState& h,
                             RandomStream& rng, int n_sweeps) {
    long accepted = 0;
    for (int sweep = 0; sweep < n_sweeps; ++sweep) {
        for (int i = 0; i < u.n; ++i) {
            const double delta = urbm_log_phi_ratio_hidden(u, x, h, i);
            if (delta >= 0.0 || rng.uniform01() < std::exp(delta)) {
                h[i] = static_cast<std::int8_t>(-h[i]);
                ++accepted;
            }
        }
    }
    return accepted;
}

double urbm_log_trace(const Urbm& u, const SpinConfiguration& x) {
    // Ordered product of per-site transfer matrices over the hidden chain,
    // rescaled each step to stay in range. Row/column index 0 means h = +1.
    double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
    double logScale = 0.0;
    double visible = 0.0;
    for (int i = 0; i < u.n; ++i) {
        visible += u.k1 * x[i] * x[wrap(i + 1, u.n)];
        const double xi = static_cast<double>(x[i]);
        const double tpp = std::exp(u.k2 + u.k3 * xi);
        const double tpm = std::exp(-u.k2 + u.k3 * xi);
        const double tmp = std::exp(-u.k2 - u.k3 * xi);
        const double tmm = std::exp(u.k2 - u.k3 * xi);
        const double a00 = m00 * tpp + m01 * tmp;
        const double a01 = m00 * tpm + m01 * tmm;
        const double a10 = m10 * tpp + m11 * tmp;
        const double a11 = m10 * tpm + m11 * tmm;
        const double s = std::max(std::max(a00, a01), std::max(a10, a11));
        m00 = a00 / s;
        m01 = a01 / s;
        m10 = a10 / s;
        m11 = a11 / s;
        logScale += std::log(s);
    }
    return visible + logScale + std::log(m00 + m11);
}

double urbm_trace(const Urbm& u, const SpinConfiguration& x) {
    return std::exp(urbm_log_trace(u, x));
}

double urbm_log_trace_ratio(const Urbm& u, const SpinConfiguration& x, int site) {
    SpinConfiguration flipped = x;
    flipped[site] = static_cast<std::int8_t>(-flipped[site]);
    return urbm_log_trace(u, flipped) - urbm_log_trace(u, x);
}

SpinGuiding SpinGuiding::boltzmann(double beta) {
    SpinGuiding g;
    g.mode = Mode::Boltzmann;
    g.beta = beta;
    return g;
}

SpinGuiding SpinGuiding::unrestricted_boltzmann_machine(const Urbm& u) {
    SpinGuiding g;
    g.mode = Mode::Urbm;
    g.urbm = u;
    return g;
}

SpinGuiding SpinGuiding::exact_table(std::vector<double> amplitudes) {
    SpinGuiding g;
    g.mode = Mode::ExactTable;
    g.amplitudes = std::make_shared<const std::vector<double>>(std::move(amplitudes));
    return g;
}

std::string SpinGuiding::label() const {
    switch (mode) {
        case Mode::None: return "none";
        case Mode::Boltzmann: return "boltzmann";
        case Mode::Urbm: return "urbm";
        case Mode::ExactTable: return "exact";
    }
    return "?";
}

double spin_log_psi(const SpinGuiding& gwf, const SpinModel& model,
                    const SpinConfiguration& x) {
    switch (gwf.mode) {
        case SpinGuiding::Mode::None:
            return 0.0;
        case SpinGuiding::Mode::Boltzmann:
            return -gwf.beta * classical_energy(model, x);
        case SpinGuiding::Mode::Urbm:
            return urbm_log_trace(gwf.urbm, x);
        case SpinGuiding::Mode::ExactTable:
            return std::log((*gwf.amplitudes)[index_from_configuration(x)]);
    }
    return 0.0;
}

double local_energy_spin(const SpinGuiding& gwf, const SpinModel& model,
                         const SpinConfiguration& x, const HiddenState* h) {
    double offdiag = 0.0;
    switch (gwf.mode) {
        case SpinGuiding::Mode::None:
            offdiag = static_cast<double>(model.n_spins);
            break;
        case SpinGuiding::Mode::Boltzmann:
            for (int i = 0; i < model.n_spins; ++i)
                offdiag += std::exp(-gwf.beta * flip_delta(model, x, i));
            break;
        case SpinGuiding::Mode::Urbm: {
            if (!h) throw std::invalid_argument("local_energy_spin: uRBM mode needs a hidden state");
            for (int i = 0; i < model.n_spins; ++i)
                offdiag += std::exp(urbm_log_phi_ratio(gwf.urbm, x, *h, i));
            break;
        }
        case SpinGuiding::Mode::ExactTable: {
            const std::uint32_t idx = index_from_configuration(x);
            const double amp = (*gwf.amplitudes)[idx];
            for (int i = 0; i < model.n_spins; ++i)
                offdiag += (*gwf.amplitudes)[idx ^ (1u << i)] / amp;
            break;
        }
    }
    return classical_energy(model, x) - model.gamma * offdiag;
}

double variational_energy_exact(const SpinGuiding& gwf, const SpinModel& model) {
    const int n = model.n_spins;
    if (n > 14)
        throw std::invalid_argument("variational_energy_exact: enumeration limited to 14 spins");
    const std::size_t dim = std::size_t(1) << n;
    std::vector<double> logPsi(dim);
    double logMax = -1e300;
    for (std::size_t b = 0; b < dim; ++b) {
        logPsi[b] = spin_log_psi(gwf, model, configuration_from_index(b, n));
        logMax = std::max(logMax, logPsi[b]);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
        const SpinConfiguration x = configuration_from_index(b, n);
        double offdiag = 0.0;
        for (int i = 0; i < n; ++i)
            offdiag += std::exp(logPsi[b ^ (std::size_t(1) << i)] - logPsi[b]);
        const double eL = classical_energy(model, x) - model.gamma * offdiag;
        const double w = std::exp(2.0 * (logPsi[b] - logMax));
        num += w * eL;
        den += w;
    }
    return num / den;
}

SampledEnergy variational_energy_sampled(const SpinGuiding& gwf, const SpinModel& model,
                                         int n_samples, std::uint64_t seed,
                                         double stderr_bound) {
    RandomStream rng(seed);
    const int n = model.n_spins;
    SpinConfiguration x(n, 1);
    HiddenState h(n, 1);
    const bool urbmMode = gwf.mode == SpinGuiding::Mode::Urbm;

    auto sweep = [&] {
        for (int i = 0; i < n; ++i) {
            const double logRatio = spin_log_psi_ratio_flip(gwf, model, x, i);
            if (2.0 * logRatio >= 0.0 || rng.uniform01() < std::exp(2.0 * logRatio))
                x[i] = static_cast<std::int8_t>(-x[i]);
        }
        if (urbmMode) hidden_metropolis_sweep(gwf.urbm, x, h, rng, 2);
    };

    const int burnIn = std::max(50, n_samples / 10);
    for (int s = 0; s < burnIn; ++s) sweep();
    std::vector<double> series;
    series.reserve(n_samples);
    for (int s = 0; s < n_samples; ++s) {
        sweep();
        series.push_back(local_energy_spin(gwf, model, x, urbmMode ? &h : nullptr));
    }

    SampledEnergy out;
    blocked_mean_stderr(series, 20, out.mean, out.stderr_of_mean);
    out.noisy = out.stderr_of_mean > stderr_bound;
    return out;
}

SpinBetaOptimum optimize_boltzmann_beta_spin(const SpinModel& model, double beta_lo,
                                             double beta_hi, std::uint64_t seed) {
    SpinBetaOptimum out;
    if (model.n_spins <= 14) {
        auto energy = [&](double b) {
            return variational_energy_exact(SpinGuiding::boltzmann(b), model);
        };
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = beta_lo, b = beta_hi;
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = energy(x1), f2 = energy(x2);
        while (b - a > 1e-6 * (1.0 + b)) {
            if (f1 < f2) {
                b = x2; x2 = x1; f2 = f1;
                x1 = b - phi * (b - a);
                f1 = energy(x1);
            } else {
                a = x1; x1 = x2; f1 = f2;
                x2 = a + phi * (b - a);
                f2 = energy(x2);
            }
            out.energy_history.push_back(std::min(f1, f2));
        }
        out.beta = 0.5 * (a + b);
        out.energy = energy(out.beta);
        out.at_edge = (out.beta - beta_lo < 1e-3 * (beta_hi - beta_lo)) ||
                      (beta_hi - out.beta < 1e-3 * (beta_hi - beta_lo));
        return out;
    }

    // Sampled route: one-parameter natural-gradient descent on the
    // log-derivative estimator O(x) = -E_cl(x).
    RandomStream rng(seed);
    const int n = model.n_spins;
    double beta = 0.5 * (beta_lo + beta_hi);
    SpinConfiguration x(n, 1);
    const int samples = 2000;
    int flatStreak = 0;
    for (int iter = 0; iter < 400; ++iter) {
        double sumE = 0.0, sumO = 0.0, sumEO = 0.0, sumOO = 0.0, sumSq = 0.0;
        const SpinGuiding gwf = SpinGuiding::boltzmann(beta);
        for (int s = 0; s < samples; ++s) {
            for (int i = 0; i < n; ++i) {
                const double lr = -2.0 * beta * flip_delta(model, x, i);
                if (lr >= 0.0 || rng.uniform01() < std::exp(lr))
                    x[i] = static_cast<std::int8_t>(-x[i]);
            }
            const double eL = local_energy_spin(gwf, model, x);
            const double o = -classical_energy(model, x);
            sumE += eL;
            sumO += o;
            sumEO += eL * o;
            sumOO += o * o;
            sumSq += (eL * o) * (eL * o);
        }
        const double m = samples;
        const double meanE = sumE / m, meanO = sumO / m;
        const double f = 2.0 * (sumEO / m - meanE * meanO);
        const double varO = sumOO / m - meanO * meanO;
        const double varEO = sumSq / m - (sumEO / m) * (sumEO / m);
        const double fErr = 2.0 * std::sqrt(std::max(varEO, 0.0) / m);
        out.energy_history.push_back(meanE);
        if (std::fabs(f) < 2.0 * fErr) {
            if (++flatStreak >= 25) {
                out.flat = true;
                break;
            }
        } else {
            flatStreak = 0;
        }
        const double step = -0.1 * f / (varO + 1e-3 * varO + 1e-12);
        beta = std::min(std::max(beta + step, beta_lo), beta_hi);
    }
    out.beta = beta;
    const SampledEnergy fin =
        variational_energy_sampled(SpinGuiding::boltzmann(beta), model, 20000, seed + 7);
    out.energy = fin.mean;
    out.at_edge = (beta - beta_lo < 1e-3 * (beta_hi - beta_lo)) ||
                  (beta_hi - beta < 1e-3 * (beta_hi - beta_lo));
    return out;
}

SrResult optimize_urbm(const SpinModel& model, const SrOptions& opts) {
    if (model.kind != SpinModel::Kind::Chain)
        throw std::invalid_argument("optimize_urbm: uRBM guiding is defined for the chain");
    const int n = model.n_spins;
    RandomStream rng(opts.seed);
    Urbm u{opts.init_k1, opts.init_k2, opts.init_k3, n};

    SpinConfiguration x(n, 1);
    HiddenState h1(n, 1), h2(n, 1);

    auto visibleSweep = [&] {
        for (int i = 0; i < n; ++i) {
            // joint move: phi(x',h1) phi(x',h2) / phi(x,h1) phi(x,h2)
            const double lr = urbm_log_phi_ratio(u, x, h1, i) + urbm_log_phi_ratio(u, x, h2, i);
            if (lr >= 0.0 || rng.uniform01() < std::exp(lr))
                x[i] = static_cast<std::int8_t>(-x[i]);
        }
    };
    auto bondSum = [&](const auto& v) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += static_cast<double>(v[i]) * v[wrap(i + 1, n)];
        return s;
    };
    auto crossSum = [&](const HiddenState& h) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += static_cast<double>(x[i]) * h[i];
        return s;
    };

    SrResult out;
    out.couplings = u;
    double lambda = opts.regularization;
    double smoothed = 0.0;
    bool smoothedPrimed = false;

    for (int iter = 0; iter < opts.iterations; ++iter) {
        // equilibrate the joint walk for the current couplings
        for (int s = 0; s < 50; ++s) {
            visibleSweep();
            hidden_metropolis_sweep(u, x, h1, rng, opts.hidden_sweeps);
            hidden_metropolis_sweep(u, x, h2, rng, opts.hidden_sweeps);
        }
        Eigen::Vector3d meanO = Eigen::Vector3d::Zero();
        Eigen::Matrix3d meanOO = Eigen::Matrix3d::Zero();
        Eigen::Vector3d meanEO = Eigen::Vector3d::Zero();
        double meanE = 0.0;
        const SpinGuiding gwf = SpinGuiding::unrestricted_boltzmann_machine(u);
        for (int s = 0; s < opts.samples_per_iteration; ++s) {
            visibleSweep();
            hidden_metropolis_sweep(u, x, h1, rng, opts.hidden_sweeps);
            hidden_metropolis_sweep(u, x, h2, rng, opts.hidden_sweeps);
            // conditional means of the log-derivatives from the two chains
            Eigen::Vector3d o;
            o(0) = bondSum(x);  // exact: independent of the hidden layer
            o(1) = 0.5 * (bondSum(h1) + bondSum(h2));
            o(2) = 0.5 * (crossSum(h1) + crossSum(h2));
            const double eL = local_energy_spin(gwf, model, x);  // exact trace ratios
            meanO += o;
            meanOO += o * o.transpose();
            meanEO += eL * o;
            meanE += eL;
        }
        const double m = opts.samples_per_iteration;
        meanO /= m;
        meanOO /= m;
        meanEO /= m;
        meanE /= m;
        const Eigen::Matrix3d s = meanOO - meanO * meanO.transpose();
        const Eigen::Vector3d f = meanEO - meanE * meanO;

        Eigen::Vector3d delta = Eigen::Vector3d::Zero();
        for (;;) {
            const Eigen::Matrix3d reg = s + lambda * Eigen::Matrix3d::Identity();
            delta = reg.ldlt().solve(-opts.learning_rate * f);
            if (delta.allFinite() && delta.norm() < 1.0) break;
            lambda *= 10.0;
            ++out.regularization_escalations;
            if (lambda > 1e6)
                throw std::runtime_error("optimize_urbm: regularization escalation failed");
        }
        u.k1 += delta(0);
        u.k2 += delta(1);
        u.k3 += delta(2);
        if (!std::isfinite(meanE) || meanE < -1e6)
            throw std::runtime_error("optimize_urbm: divergent energy");

        out.energy_history.push_back(meanE);
        out.iterations_used = iter + 1;
        if (!smoothedPrimed) {
            smoothed = meanE;
            smoothedPrimed = true;
        } else {
            smoothed += (meanE - smoothed) / 10.0;
        }
        // stop once the 10-iteration smoothed energy moves by less than 1e-4
        // (relative) across a 20-iteration window
        if (iter >= 40) {
            auto windowMean = [&](int lo, int hi) {
                double s = 0.0;
                for (int k = lo; k <= hi; ++k) s += out.energy_history[k];
                return s / (hi - lo + 1);
            };
            const double prevSmoothed = windowMean(iter - 29, iter - 20);
            const double curSmoothed = windowMean(iter - 9, iter);
            if (std::fabs(curSmoothed - prevSmoothed) <
                1e-4 * std::max(1.0, std::fabs(curSmoothed)))
                break;
        }
    }

    out.couplings = u;
    if (n <= 14) {
        out.energy = variational_energy_exact(SpinGuiding::unrestricted_boltzmann_machine(u), model);
        out.energy_stderr = 0.0;
    } else {
        const SampledEnergy fin = variational_energy_sampled(
            SpinGuiding::unrestricted_boltzmann_machine(u), model, 20000, opts.seed + 13);
        out.energy = fin.mean;
        out.energy_stderr = fin.stderr_of_mean;
    }
    return out;
}

void write_gwf_record(const std::string& path, const GwfRecord& rec) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17);
    f << "model = " << rec.model_label << "\n";
    f << "gwf = " << rec.gwf_kind << "\n";
    f << "beta = " << rec.beta << "\n";
    f << "k1 = " << rec.k1 << "\n";
    f << "k2 = " << rec.k2 << "\n";
    f << "k3 = " << rec.k3 << "\n";
    f << "energy = " << rec.energy << "\n";
    f << "energy_stderr = " << rec.energy_stderr << "\n";
}

GwfRecord read_gwf_record(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    GwfRecord rec;
    std::string line;
    while (std::getline(f, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t\r");
            s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
        };
        trim(key);
        trim(value);
        if (key == "model") rec.model_label = value;
        else if (key == "gwf") rec.gwf_kind = value;
        else if (key == "beta") rec.beta = std::stod(value);
        else if (key == "k1") rec.k1 = std::stod(value);
        else if (key == "k2") rec.k2 = std::stod(value);
        else if (key == "k3") rec.k3 = std::stod(value);
        else if (key == "energy") rec.energy = std::stod(value);
        else if (key == "energy_stderr") rec.energy_stderr = std::stod(value);
    }
    return rec;
}

} // namespace pqmc
