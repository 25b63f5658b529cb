#include "pqmc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>

#include "pqmc/random.hpp"

namespace pqmc {
namespace {

// Symmetric tridiagonal matrix with constant off-diagonal.
struct Tridiag {
    std::vector<double> diag;
    double off = 0.0;
    int size() const { return static_cast<int>(diag.size()); }
};

// Number of eigenvalues strictly below lambda (Sturm count via the LDL^T
// recurrence, with a floor to avoid division by zero).
int sturm_count(const Tridiag& t, double lambda) {
    const double tiny = 1e-300;
    int count = 0;
    double q = t.diag[0] - lambda;
    if (q < 0.0) ++count;
    for (int i = 1; i < t.size(); ++i) {
        double denom = q;
        if (std::fabs(denom) < tiny) denom = (denom < 0.0 ? -tiny : tiny);
        q = t.diag[i] - lambda - t.off * t.off / denom;
        if (q < 0.0) ++count;
    }
    return count;
}

// k-th smallest eigenvalue (k is 1-based) by bisection.
double bisect_eigenvalue(const Tridiag& t, int k) {
    double lo = t.diag[0], hi = t.diag[0];
    for (double d : t.diag) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    lo -= 2.0 * std::fabs(t.off);
    hi += 2.0 * std::fabs(t.off);
    const double scale = std::max({std::fabs(lo), std::fabs(hi), 1.0});
    for (int it = 0; it < 200 && hi - lo > 1e-16 * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(t, mid) >= k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Solves (T - sigma I) x = b with partial pivoting (the shifted matrix is
// near-singular by construction, so plain Thomas elimination is not safe).
struct ShiftedSolver {
    ShiftedSolver(const Tridiag& t, double sigma) : n(t.size()) {
        d.resize(n);
        du.resize(n, 0.0);
        du2.resize(n, 0.0);
        dl.resize(n, 0.0);
        swapped.assign(n, false);
        for (int i = 0; i < n; ++i) d[i] = t.diag[i] - sigma;
        for (int i = 0; i + 1 < n; ++i) {
            du[i] = t.off;
            dl[i] = t.off;
        }
        // LU factorization of a tridiagonal matrix with row swaps.
        for (int i = 0; i + 1 < n; ++i) {
            if (std::fabs(dl[i]) > std::fabs(d[i])) {
                swapped[i] = true;
                std::swap(d[i], dl[i]);
                std::swap(du[i], d[i + 1]);
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = 0.0;
                }
            }
            double m = 0.0;
            if (d[i] != 0.0) m = dl[i] / d[i];
            dl[i] = m;
            d[i + 1] -= m * du[i];
            if (i + 2 < n) du[i + 1] -= m * du2[i];
        }
    }

    void solve(std::vector<double>& x) const {
        const double tiny = 1e-300;
        for (int i = 0; i + 1 < n; ++i) {
            if (swapped[i]) std::swap(x[i], x[i + 1]);
            x[i + 1] -= dl[i] * x[i];
        }
        for (int i = n - 1; i >= 0; --i) {
            double v = x[i];
            if (i + 1 < n) v -= du[i] * x[i + 1];
            if (i + 2 < n) v -= du2[i] * x[i + 2];
            double piv = d[i];
            if (std::fabs(piv) < tiny) piv = (piv < 0.0 ? -tiny : tiny);
            x[i] = v / piv;
        }
    }

    int n;
    std::vector<double> d, du, du2, dl;
    std::vector<bool> swapped;
};

void orthogonalize(std::vector<double>& v, const std::vector<double>& u) {
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * u[i];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * u[i];
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Shifted inverse iteration; the shift comes from bisection, so a couple of
// iterations reach round-off. Deflation keeps nearly degenerate pairs apart.
std::vector<double> inverse_iteration(const Tridiag& t, double lambda,
                                      const std::vector<double>* deflate) {
    const int n = t.size();
    ShiftedSolver solver(t, lambda);
    RandomStream rng(0x5eed5eedULL);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform01() - 0.5;
    if (deflate) orthogonalize(v, *deflate);
    double nv = norm2(v);
    for (double& x : v) x /= nv;

    const double matScale = [&] {
        double m = 0.0;
        for (double d : t.diag) m = std::max(m, std::fabs(d));
        return m + 2.0 * std::fabs(t.off);
    }();

    double residual = std::numeric_limits<double>::max();
    const int maxIter = 60;
    for (int it = 0; it < maxIter; ++it) {
        solver.solve(v);
        if (deflate) orthogonalize(v, *deflate);
        nv = norm2(v);
        for (double& x : v) x /= nv;
        // residual ||T v - lambda v||
        residual = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = (t.diag[i] - lambda) * v[i];
            if (i > 0) r += t.off * v[i - 1];
            if (i + 1 < n) r += t.off * v[i + 1];
            residual += r * r;
        }
        residual = std::sqrt(residual);
        if (residual < 1e-11 * matScale) return v;
    }
    throw EigenIterationFailure(maxIter, residual);
}

} // namespace

SpectralResult solve_lowest_two(const std::function<double(double)>& potential,
                                const Grid1D& grid) {
    const double h = grid.spacing();
    const int nInterior = grid.n_points - 2;
    if (nInterior < 3) throw std::invalid_argument("solve_lowest_two: grid too coarse");

    Tridiag t;
    t.off = -0.5 / (h * h);
    t.diag.resize(nInterior);
    for (int i = 0; i < nInterior; ++i)
        t.diag[i] = 1.0 / (h * h) + potential(grid.x(i + 1));

    const double e0 = bisect_eigenvalue(t, 1);
    const double e1 = bisect_eigenvalue(t, 2);
    std::vector<double> v0 = inverse_iteration(t, e0, nullptr);
    std::vector<double> v1 = inverse_iteration(t, e1, &v0);

    SpectralResult out;
    out.grid = grid;
    out.e0 = e0;
    out.e1 = e1;
    out.gap = e1 - e0;

    // Sign conventions: psi0 nonnegative, psi1 positive on the right half.
    int iMax0 = 0;
    for (int i = 1; i < nInterior; ++i)
        if (std::fabs(v0[i]) > std::fabs(v0[iMax0])) iMax0 = i;
    if (v0[iMax0] < 0.0)
        for (double& x : v0) x = -x;
    int iMax1 = nInterior / 2;
    for (int i = nInterior / 2; i < nInterior; ++i)
        if (std::fabs(v1[i]) > std::fabs(v1[iMax1])) iMax1 = i;
    if (v1[iMax1] < 0.0)
        for (double& x : v1) x = -x;

    // Normalize with the grid measure and embed with Dirichlet endpoints.
    const double invSqrtH = 1.0 / std::sqrt(h);
    auto embed = [&](const std::vector<double>& v) {
        std::vector<double> full(grid.n_points, 0.0);
        for (int i = 0; i < nInterior; ++i) full[i + 1] = v[i] * invSqrtH;
        return full;
    };
    out.psi0 = embed(v0);
    out.psi1 = embed(v1);

    const double boundaryAmp =
        std::max({std::fabs(out.psi0[1]), std::fabs(out.psi0[grid.n_points - 2]),
                  std::fabs(out.psi1[1]), std::fabs(out.psi1[grid.n_points - 2])});
    if (boundaryAmp >= 1e-8) throw GridTooSmall(boundaryAmp);
    return out;
}

double wkb_gap(double g) {
    if (g <= 0.0) throw std::invalid_argument("wkb_gap: g must be positive");
    return 8.0 * std::sqrt(g / std::numbers::pi) * std::exp(-2.0 * g / 3.0);
}

double kramers_activation_time(double barrier, double curv_min, double curv_top) {
    if (!(curv_min > 0.0) || !(curv_top < 0.0))
        throw std::invalid_argument("kramers_activation_time: input is not bistable");
    return 2.0 * std::numbers::pi / std::sqrt(curv_min * std::fabs(curv_top)) *
           std::exp(2.0 * barrier);
}

EffectiveProfile effective_potential_profile(const SpectralResult& sr) {
    const Grid1D& grid = sr.grid;
    const int i0 = grid.nearest_index(0.0);
    int iMin = 1;
    for (int i = 1; i <= i0; ++i)
        if (sr.psi0[i] > sr.psi0[iMin]) iMin = i;

    auto veff = [&](int i) {
        if (!(sr.psi0[i] > 0.0))
            throw std::invalid_argument("effective_potential_profile: psi0 not positive in window");
        return -std::log(sr.psi0[i]);
    };
    const double h = grid.spacing();
    EffectiveProfile p;
    p.x_min = grid.x(iMin);
    p.barrier = veff(i0) - veff(iMin);
    p.curv_min = (veff(iMin + 1) - 2.0 * veff(iMin) + veff(iMin - 1)) / (h * h);
    p.curv_top = (veff(i0 + 1) - 2.0 * veff(i0) + veff(i0 - 1)) / (h * h);
    return p;
}

SingleWellAmplitude wkb_single_well_amplitude(const PotentialSpec& pot, double e0,
                                              const Grid1D& grid) {
    if (!(e0 < pot.value(0.0)))
        throw std::invalid_argument("wkb_single_well_amplitude: E0 not below the barrier top");

    // First sign change of V - E0 right of the origin.
    const int i0 = grid.nearest_index(0.0);
    int cell = -1;
    for (int i = i0; i + 1 < grid.n_points; ++i) {
        if (pot.value(grid.x(i)) - e0 > 0.0 && pot.value(grid.x(i + 1)) - e0 <= 0.0) {
            cell = i;
            break;
        }
    }
    if (cell < 0)
        throw std::invalid_argument("wkb_single_well_amplitude: no classical turning point");
    double lo = grid.x(cell), hi = grid.x(cell + 1);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pot.value(mid) - e0 > 0.0 ? lo : hi) = mid;
    }
    const double a = 0.5 * (lo + hi);

    // Composite trapezoid of sqrt(2(V - E0)) from 0 to the turning point,
    // integrand clamped to zero there.
    auto momentum = [&](double x) {
        const double v = 2.0 * (pot.value(x) - e0);
        return v > 0.0 ? std::sqrt(v) : 0.0;
    };
    double action = 0.0;
    const double h = grid.spacing();
    for (int i = i0; i <= cell; ++i) {
        const double xl = grid.x(i);
        const double xr = grid.x(i + 1);
        if (xr <= a) {
            action += 0.5 * h * (momentum(xl) + momentum(xr));
        } else {
            action += 0.5 * (a - xl) * momentum(xl);  // integrand vanishes at a
        }
    }

    SingleWellAmplitude out;
    out.turning_point = a;
    out.psi_r0 = std::exp(-action);
    out.dpsi_r0 = out.psi_r0 * momentum(0.0);
    out.gap_estimate = out.psi_r0 * out.dpsi_r0;
    return out;
}

void write_spectrum_csv(const std::string& path, const PotentialSpec& pot,
                        const SpectralResult& sr) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17);
    f << "# pqmc-csv-v1 spectrum\n";
    f << "x,V,psi0,psi1\n";
    for (int i = 0; i < sr.grid.n_points; ++i) {
        const double x = sr.grid.x(i);
        f << x << ',' << pot.value(x) << ',' << sr.psi0[i] << ',' << sr.psi1[i] << '\n';
    }
}

} // namespace pqmc
