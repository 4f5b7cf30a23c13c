#pragma once

#include <string>
#include <vector>

#include "qscat/catalog.hpp"
#include "qscat/directions.hpp"
#include "qscat/wave.hpp"

namespace qscat {

// One verified decay/smoothness bound.
struct ValidationCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double allowed = 0.0;
  std::string detail;
};

struct ValidationReport {
  bool passed = false;
  std::vector<ValidationCheck> checks;
};

// Samples a deterministic Halton cloud (bases 2,3,5; `points` points) in
// the cube [-radius, radius]^3 and checks <x>^{5+eps}|d^a V| <= C for
// |a| <= 2 via central differences, plus positivity of the declared
// support radius.
ValidationReport validate_potential(const Potential& V, int points = 4096,
                                    double radius = -1.0);

// Same weighted-decay check with weight 4+eps for the source profile.
ValidationReport validate_form_factor(const FormFactor& rho, int points = 4096,
                                      double radius = -1.0);

// Wiener condition: min_j |rho_hat(|k| theta_j)| over the direction set
// must exceed `tol`.  rho_hat(xi) = integral e^{i xi.x} rho(x) dx,
// evaluated by grid quadrature refined until successive levels agree to
// rtol; disagreement after max refinement -> resolution_error.
struct WienerResult {
  bool passed = false;
  double min_abs = 0.0;
  double tol = 0.0;
  size_t argmin = 0;
  std::vector<cplx> rho_hat;
};
WienerResult wiener_check(const FormFactor& rho, double kmag,
                          const DirectionGrid& dirs, double tol = 1e-8,
                          double rtol = 1e-9);

// rho_hat(xi) for one frequency (same refinement policy).
cplx fourier_transform(const FormFactor& rho, const Vec3& xi,
                       double rtol = 1e-9);

}  // namespace qscat
