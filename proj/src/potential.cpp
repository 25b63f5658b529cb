#include "pqmc/potential.hpp"

namespace pqmc {

Grid1D default_spectral_grid(const PotentialSpec& pot, double margin, double max_spacing) {
    return make_symmetric_grid(pot.right_minimum() + margin, max_spacing);
}

} // namespace pqmc
