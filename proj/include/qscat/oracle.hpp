#pragma once

#include <vector>

#include "qscat/catalog.hpp"
#include "qscat/grid.hpp"

namespace qscat {

// Radial partial-wave data for a (radial) potential at wavenumber k.
struct PhaseShiftSet {
  double k = 0.0;
  std::vector<double> delta;      // delta_l, l = 0..l_max
  std::vector<double> delta_born; // first-order check values
  int l_max = 0;
  double r_match = 0.0;
};

// Numerov integration of u'' = (2V + l(l+1)/r^2 - k^2) u with two-radius
// matching to Riccati-Bessel functions beyond the support.  l_max < 0
// picks the first l where |delta| < 1e-12 (capped at 60).
PhaseShiftSet phase_shifts(const Potential& V, double k, int l_max = -1,
                           double r_grid_h = 1e-3);

// f(theta) = (1/k) sum (2l+1) e^{i delta_l} sin(delta_l) P_l(cos theta),
// same normalization as the Nystrom amplitude a(k, theta).
cplx partial_wave_amplitude(const PhaseShiftSet& ps, double cos_theta);

// Number of bound states (node count of the zero-energy regular solution
// per l, summed with multiplicity 2l+1).
int bound_state_count(const Potential& V, int l_max = 20);

}  // namespace qscat
