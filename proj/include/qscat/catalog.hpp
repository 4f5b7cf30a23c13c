#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qscat/grid.hpp"

namespace qscat {

using ParamMap = std::map<std::string, double>;

// A smooth decaying real potential from the named catalog.  All catalog
// entries are radial; support_radius is where |V| falls below
// support_tol * max|V| (so the solve box [-R,R]^3 captures the
// interaction to that relative level).  envelope_C bounds
// <x>^{5+eps} |d^a V| for |a| <= 2, measured at construction.
struct Potential {
  std::string name;
  ParamMap params;
  std::function<double(double)> radial;  // V(r)
  double support_radius = 0.0;
  double support_tol = 1e-12;
  double envelope_C = 0.0;
  double envelope_eps = 0.5;

  double operator()(const Vec3& x) const { return radial(norm(x)); }
  bool is_zero() const { return name == "zero"; }
};

// Smooth compactly-supported-in-practice source profile rho(x) (complex
// phase allowed via the `phase` parameter).  Decay weight is 4 + eps.
struct FormFactor {
  std::string name;
  ParamMap params;
  std::function<cplx(const Vec3&)> eval;
  std::function<double(double)> radial_abs;  // |rho|(r) majorant
  double support_radius = 0.0;
  double support_tol = 1e-12;
  double envelope_C = 0.0;
  double envelope_eps = 0.5;
};

// Catalog construction.  Unknown name or out-of-range parameter ->
// config_error with the offending key in the message.
//
// Potentials:
//   zero                 {}
//   gaussian_well        {g, width}        V = g exp(-r^2/width^2)
//   yukawa_regularized   {g, mu, core}     V = g exp(-mu s)/s, s = sqrt(r^2+core^2)
//   soft_barrier         {g, width, rim}   V = g / (1 + exp((r - width)/rim))
// Form factors:
//   gaussian_source      {amplitude, width, phase}  rho = A e^{i phase} exp(-r^2/width^2)
Potential make_potential(const std::string& name, const ParamMap& params);
FormFactor make_form_factor(const std::string& name, const ParamMap& params);

struct CatalogEntry {
  std::string name;
  std::string kind;  // "potential" | "form_factor"
  std::string signature;
  std::string notes;
};
std::vector<CatalogEntry> catalog();

}  // namespace qscat
