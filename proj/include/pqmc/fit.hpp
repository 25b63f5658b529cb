#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace pqmc {

// One data point of a tunneling-time scaling curve.
struct ScalingPoint {
    double gap = 0.0;       // Delta
    double xi = 0.0;        // tunneling time
    double xi_err = 0.0;    // stderr of xi
};

// Parameters of xi(Delta) = alpha * Delta^(-b), fitted in log space.
struct PowerLawFit {
    double alpha = 0.0;
    double b = 0.0;
    double alpha_err = 0.0;
    double b_err = 0.0;
    int points_used = 0;
    std::string fit_window;
};

// Weighted least squares of ln(xi) = ln(alpha) - b ln(Delta) over the
// `window` points with the smallest gaps; weights are (xi_err/xi)^-2 and
// parameter errors come from the covariance of the linear solve.
// Throws std::invalid_argument on fewer than 3 usable points or a singular
// design (all gaps equal).
PowerLawFit fit_power_law(const std::vector<ScalingPoint>& points, int window);

// Nonparametric bootstrap error on the exponent: the per-point repetition
// samples are resampled with replacement, each replica is refitted, and the
// spread of the replica exponents is returned.
double bootstrap_b_error(const std::vector<ScalingPoint>& points,
                         const std::vector<std::vector<double>>& samples_per_point,
                         int window, int resamples = 1000, std::uint64_t seed = 1234);

} // namespace pqmc
