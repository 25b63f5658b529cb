#pragma once

namespace pqmc {

// Single-mode energy of the fermionized transverse-field Ising chain:
// 2 sqrt(J^2 + Gamma^2 - 2 J Gamma cos k).
double free_fermion_mode_energy(double k, double j, double gamma);

// Sector ground energies of the periodic chain after the Jordan-Wigner
// mapping. Even fermion parity pairs with antiperiodic momenta, odd parity
// with periodic momenta; the unpaired periodic k = 0 level carries the
// signed energy 2 (Gamma - J), so in the ferromagnetic phase the base
// periodic state is already parity-odd, and otherwise the cheapest single
// quasiparticle is added to fix the parity. The convention is validated
// against exact diagonalization, which is convention-free.
struct FreeFermionSectors {
    double even = 0.0;  // lowest energy with even fermion parity
    double odd = 0.0;   // lowest energy with odd fermion parity
};

FreeFermionSectors free_fermion_sector_energies(int n, double j, double gamma);

// |E_odd - E_even|: the gap between the two lowest levels of the chain.
double free_fermion_gap(int n, double j, double gamma);

} // namespace pqmc
