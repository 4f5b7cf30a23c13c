#include "qscat/catalog.hpp"

#include <cmath>

namespace qscat {

namespace {

double get_param(const ParamMap& p, const std::string& key, double def,
                 double lo, double hi, const std::string& owner) {
  double v = def;
  if (auto it = p.find(key); it != p.end()) v = it->second;
  if (!(v >= lo && v <= hi))
    throw config_error(owner + ": parameter '" + key + "' = " +
                       std::to_string(v) + " outside [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
  return v;
}

void reject_unknown(const ParamMap& p, std::initializer_list<const char*> keys,
                    const std::string& owner) {
  for (const auto& [k, v] : p) {
    bool known = false;
    for (const char* key : keys)
      if (k == key) known = true;
    if (!known)
      throw config_error(owner + ": unknown parameter '" + k + "'");
  }
}

// Largest r with |f|(r) >= tol * |f|(0); catalog profiles decay
// monotonically past their single scale.
double support_bisect(const std::function<double(double)>& fabs, double tol,
                      const std::string& owner) {
  double f0 = fabs(0.0);
  if (f0 <= 0.0) return 1.0;  // identically-zero profile
  double floor = tol * f0;
  double hi = 1.0;
  while (fabs(hi) >= floor) {
    hi *= 2.0;
    if (hi > 1e6) throw config_error(owner + ": support radius diverges");
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (fabs(mid) >= floor ? lo : hi) = mid;
  }
  return hi;
}

// sup_r <r>^{weight} max(|f|, |f'|, |f''|, |f'/r|) over the decay range,
// derivatives by 5-point central differences.
double weighted_envelope(const std::function<double(double)>& f,
                         double weight, double r_max) {
  double best = 0.0;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    double r = r_max * i / n;
    double hh = 1e-4 * (1.0 + r);
    double fm2 = f(std::abs(r - 2 * hh)), fm1 = f(std::abs(r - hh));
    double f0 = f(r), fp1 = f(r + hh), fp2 = f(r + 2 * hh);
    double d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * hh);
    double d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * hh * hh);
    double slope = r > 1e-6 ? std::abs(d1) / r : std::abs(d2);
    double m = std::max({std::abs(f0), std::abs(d1), std::abs(d2), slope});
    best = std::max(best, std::pow(1.0 + r * r, weight / 2.0) * m);
  }
  return best;
}

Potential finish_potential(Potential V) {
  auto a = [f = V.radial](double r) { return std::abs(f(r)); };
  V.support_radius = support_bisect(a, V.support_tol, V.name);
  V.envelope_C =
      1.05 * weighted_envelope(V.radial, 5.0 + V.envelope_eps,
                               1.5 * V.support_radius + 1.0);
  return V;
}

}  // namespace

Potential make_potential(const std::string& name, const ParamMap& params) {
  Potential V;
  V.name = name;
  V.params = params;
  if (name == "zero") {
    reject_unknown(params, {}, name);
    V.radial = [](double) { return 0.0; };
    V.support_radius = 1.0;
    V.envelope_C = 0.0;
    return V;
  }
  if (name == "gaussian_well") {
    reject_unknown(params, {"g", "width"}, name);
    double g = get_param(params, "g", -1.0, -100.0, 100.0, name);
    double w = get_param(params, "width", 1.0, 0.05, 20.0, name);
    V.radial = [g, w](double r) { return g * std::exp(-r * r / (w * w)); };
    return finish_potential(std::move(V));
  }
  if (name == "yukawa_regularized") {
    reject_unknown(params, {"g", "mu", "core"}, name);
    double g = get_param(params, "g", 0.01, -100.0, 100.0, name);
    double mu = get_param(params, "mu", 4.0, 0.1, 50.0, name);
    double c = get_param(params, "core", 0.08, 0.005, 5.0, name);
    V.radial = [g, mu, c](double r) {
      double s = std::sqrt(r * r + c * c);
      return g * std::exp(-mu * s) / s;
    };
    return finish_potential(std::move(V));
  }
  if (name == "soft_barrier") {
    reject_unknown(params, {"g", "width", "rim"}, name);
    double g = get_param(params, "g", 1.0, -100.0, 100.0, name);
    double w = get_param(params, "width", 1.0, 0.1, 20.0, name);
    double rim = get_param(params, "rim", 0.2, 0.01, 5.0, name);
    V.radial = [g, w, rim](double r) {
      return g / (1.0 + std::exp((r - w) / rim));
    };
    return finish_potential(std::move(V));
  }
  throw config_error("make_potential: unknown catalog name '" + name + "'");
}

FormFactor make_form_factor(const std::string& name, const ParamMap& params) {
  FormFactor F;
  F.name = name;
  F.params = params;
  if (name == "gaussian_source") {
    reject_unknown(params, {"amplitude", "width", "phase"}, name);
    double A = get_param(params, "amplitude", 1.0, 1e-12, 1e6, name);
    double w = get_param(params, "width", 0.5, 0.05, 20.0, name);
    double ph = get_param(params, "phase", 0.0, -6.2832, 6.2832, name);
    cplx amp = A * std::exp(cplx(0.0, ph));
    F.eval = [amp, w](const Vec3& x) {
      return amp * std::exp(-dot(x, x) / (w * w));
    };
    F.radial_abs = [A, w](double r) { return A * std::exp(-r * r / (w * w)); };
    F.support_radius = support_bisect(F.radial_abs, F.support_tol, name);
    F.envelope_C = 1.05 * weighted_envelope(
                              [A, w](double r) {
                                return A * std::exp(-r * r / (w * w));
                              },
                              4.0 + F.envelope_eps,
                              1.5 * F.support_radius + 1.0);
    return F;
  }
  throw config_error("make_form_factor: unknown catalog name '" + name + "'");
}

std::vector<CatalogEntry> catalog() {
  return {
      {"zero", "potential", "{}", "free propagation reference"},
      {"gaussian_well", "potential", "{g=-1, width=1}",
       "V = g exp(-r^2/width^2)"},
      {"yukawa_regularized", "potential", "{g=0.01, mu=4, core=0.08}",
       "V = g exp(-mu s)/s, s = sqrt(r^2 + core^2); Born regime at small g"},
      {"soft_barrier", "potential", "{g=1, width=1, rim=0.2}",
       "V = g / (1 + exp((r - width)/rim))"},
      {"gaussian_source", "form_factor", "{amplitude=1, width=0.5, phase=0}",
       "rho = A e^{i phase} exp(-r^2/width^2)"},
  };
}

}  // namespace qscat
