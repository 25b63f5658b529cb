#include "pqmc/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pqmc/random.hpp"

namespace pqmc {
namespace {

std::vector<std::size_t> smallest_gap_indices(const std::vector<ScalingPoint>& points,
                                              int window) {
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return points[a].gap < points[b].gap;
    });
    idx.resize(std::min<std::size_t>(window, idx.size()));
    return idx;
}

PowerLawFit weighted_log_fit(const std::vector<ScalingPoint>& pts) {
    // design: y = c0 + c1 * t with y = ln(xi), t = -ln(Delta)
    double s00 = 0.0, s01 = 0.0, s11 = 0.0, sy0 = 0.0, sy1 = 0.0;
    for (const auto& p : pts) {
        if (!(p.gap > 0.0) || !(p.xi > 0.0))
            throw std::invalid_argument("fit_power_law: needs positive gaps and times");
        const double relErr = p.xi_err > 0.0 ? p.xi_err / p.xi : 1e-6;
        const double w = 1.0 / (relErr * relErr);
        const double t = -std::log(p.gap);
        const double y = std::log(p.xi);
        s00 += w;
        s01 += w * t;
        s11 += w * t * t;
        sy0 += w * y;
        sy1 += w * t * y;
    }
    const double det = s00 * s11 - s01 * s01;
    if (!(std::fabs(det) > 1e-12 * s00 * s11) || !(s11 > 0.0))
        throw std::invalid_argument("fit_power_law: singular design (gaps not distinct)");
    const double c0 = (s11 * sy0 - s01 * sy1) / det;
    const double c1 = (s00 * sy1 - s01 * sy0) / det;

    PowerLawFit fit;
    fit.alpha = std::exp(c0);
    fit.b = c1;
    fit.alpha_err = fit.alpha * std::sqrt(s11 / det);
    fit.b_err = std::sqrt(s00 / det);
    fit.points_used = static_cast<int>(pts.size());
    return fit;
}

} // namespace

PowerLawFit fit_power_law(const std::vector<ScalingPoint>& points, int window) {
    if (window < 3) throw std::invalid_argument("fit_power_law: window must cover >= 3 points");
    const auto idx = smallest_gap_indices(points, window);
    if (idx.size() < 3) throw std::invalid_argument("fit_power_law: fewer than 3 points");
    std::vector<ScalingPoint> pts;
    pts.reserve(idx.size());
    for (std::size_t i : idx) pts.push_back(points[i]);
    PowerLawFit fit = weighted_log_fit(pts);
    // pts is sorted by gap ascending, so front carries the largest 1/Delta
    std::ostringstream w;
    w << idx.size() << " smallest-gap points, 1/Delta in ["
      << 1.0 / pts.back().gap << ", " << 1.0 / pts.front().gap << "]";
    fit.fit_window = w.str();
    return fit;
}

double bootstrap_b_error(const std::vector<ScalingPoint>& points,
                         const std::vector<std::vector<double>>& samples_per_point,
                         int window, int resamples, std::uint64_t seed) {
    if (samples_per_point.size() != points.size())
        throw std::invalid_argument("bootstrap_b_error: sample lists do not match points");
    RandomStream rng(seed);
    std::vector<double> bValues;
    bValues.reserve(resamples);
    std::vector<ScalingPoint> replica = points;
    for (int r = 0; r < resamples; ++r) {
        for (std::size_t p = 0; p < points.size(); ++p) {
            const auto& pool = samples_per_point[p];
            if (pool.size() < 2) continue;  // keep the original mean/err
            double sum = 0.0, sumSq = 0.0;
            const auto n = pool.size();
            for (std::size_t k = 0; k < n; ++k) {
                const double v = pool[rng.uniform_index(n)];
                sum += v;
                sumSq += v * v;
            }
            const double mean = sum / static_cast<double>(n);
            const double var =
                std::max(0.0, (sumSq / static_cast<double>(n) - mean * mean)) *
                static_cast<double>(n) / std::max<double>(1.0, static_cast<double>(n - 1));
            replica[p].xi = mean;
            replica[p].xi_err = std::sqrt(var / static_cast<double>(n));
        }
        try {
            bValues.push_back(fit_power_law(replica, window).b);
        } catch (const std::invalid_argument&) {
            // degenerate replica (e.g. zero mean); skip
        }
    }
    if (bValues.size() < 10) return 0.0;
    double mean = 0.0;
    for (double b : bValues) mean += b;
    mean /= static_cast<double>(bValues.size());
    double ss = 0.0;
    for (double b : bValues) ss += (b - mean) * (b - mean);
    return std::sqrt(ss / static_cast<double>(bValues.size() - 1));
}

} // namespace pqmc
