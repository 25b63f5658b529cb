#include "pqmc/free_fermion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pqmc {

double free_fermion_mode_energy(double k, double j, double gamma) {
    return 2.0 * std::sqrt(j * j + gamma * gamma - 2.0 * j * gamma * std::cos(k));
}

FreeFermionSectors free_fermion_sector_energies(int n, double j, double gamma) {
    if (n < 2) throw std::invalid_argument("free_fermion_sector_energies: need n >= 2");
    const double pi = std::numbers::pi;

    // Antiperiodic momenta k = (2m+1) pi / n, m = 0..n-1, and periodic
    // momenta k = 2 m pi / n; each set has n values in (-pi, pi].
    std::vector<double> antiperiodic, periodic;
    for (int m = 0; m < n; ++m) {
        double ka = (2.0 * m + 1.0) * pi / n;
        double kp = 2.0 * m * pi / n;
        if (ka > pi + 1e-12) ka -= 2.0 * pi;
        if (kp > pi + 1e-12) kp -= 2.0 * pi;
        antiperiodic.push_back(ka);
        periodic.push_back(kp);
    }

    FreeFermionSectors out;
    for (double k : antiperiodic) out.even -= 0.5 * free_fermion_mode_energy(k, j, gamma);

    // Periodic sector: summing -eps(k)/2 with eps(0) = 2|J - Gamma| already
    // fills the k = 0 level when its signed energy 2(Gamma - J) is negative.
    double base = 0.0;
    double minMode = free_fermion_mode_energy(periodic.front(), j, gamma);
    for (double k : periodic) {
        const double eps = free_fermion_mode_energy(k, j, gamma);
        base -= 0.5 * eps;
        minMode = std::min(minMode, eps);
    }
    const bool baseParityOdd = gamma < j;
    out.odd = baseParityOdd ? base : base + minMode;
    return out;
}

double free_fermion_gap(int n, double j, double gamma) {
    const FreeFermionSectors s = free_fermion_sector_energies(n, j, gamma);
    return std::fabs(s.odd - s.even);
}

} // namespace pqmc
