#include "qscat/validate.hpp"

#include <cmath>
#include <limits>

namespace qscat {

namespace {

double radical_inverse(int base, int i) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * (i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

std::vector<Vec3> halton_cloud(int points, double radius) {
  std::vector<Vec3> cloud;
  cloud.reserve(size_t(points));
  for (int i = 1; i <= points; ++i)
    cloud.push_back({radius * (2.0 * radical_inverse(2, i) - 1.0),
                     radius * (2.0 * radical_inverse(3, i) - 1.0),
                     radius * (2.0 * radical_inverse(5, i) - 1.0)});
  return cloud;
}

// max over |alpha| <= 2 of |d^alpha f| at x, central differences.
double max_partials(const std::function<double(const Vec3&)>& f,
                    const Vec3& x) {
  double h = 2e-4 * (1.0 + norm(x));
  double m = std::abs(f(x));
  for (int d = 0; d < 3; ++d) {
    Vec3 e{0, 0, 0};
    e[size_t(d)] = h;
    double fp = f(x + e), fm = f(x - e);
    m = std::max(m, std::abs(fp - fm) / (2 * h));
    m = std::max(m, std::abs(fp - 2 * f(x) + fm) / (h * h));
  }
  for (int d1 = 0; d1 < 3; ++d1)
    for (int d2 = d1 + 1; d2 < 3; ++d2) {
      Vec3 e1{0, 0, 0}, e2{0, 0, 0};
      e1[size_t(d1)] = h;
      e2[size_t(d2)] = h;
      double v = (f(x + e1 + e2) - f(x + e1 - e2) - f(x - e1 + e2) +
                  f(x - e1 - e2)) /
                 (4 * h * h);
      m = std::max(m, std::abs(v));
    }
  return m;
}

ValidationReport decay_report(const std::function<double(const Vec3&)>& f,
                              double weight, double C, double support_radius,
                              double support_tol, int points, double radius,
                              const std::string& label) {
  ValidationReport rep;
  ValidationCheck sup;
  sup.name = label + ".support_radius";
  sup.measured = support_radius;
  sup.allowed = 0.0;
  sup.passed = support_radius > 0.0;
  sup.detail = "declared support radius must be positive";
  rep.checks.push_back(sup);

  ValidationCheck env;
  env.name = label + ".weighted_envelope";
  double worst = 0.0;
  for (const Vec3& x : halton_cloud(points, radius)) {
    double v = std::pow(1.0 + dot(x, x), weight / 2.0) * max_partials(f, x);
    worst = std::max(worst, v);
  }
  env.measured = worst;
  env.allowed = C * (1.0 + 1e-6);
  env.passed = worst <= env.allowed;
  env.detail = "sup <x>^" + std::to_string(weight) +
               " |d^a f|, |a|<=2, over " + std::to_string(points) +
               " Halton points";
  rep.checks.push_back(env);

  ValidationCheck tail;
  tail.name = label + ".tail_below_tol";
  double f0 = std::abs(f({0, 0, 0}));
  double scale = std::max(f0, worst);
  Vec3 edge{support_radius, 0, 0};
  tail.measured = std::abs(f(edge));
  tail.allowed = support_tol * std::max(scale, 1e-300) * 1.5;
  tail.passed = scale == 0.0 || tail.measured <= tail.allowed;
  tail.detail = "|f| at the declared support radius";
  rep.checks.push_back(tail);

  rep.passed = true;
  for (const auto& c : rep.checks) rep.passed = rep.passed && c.passed;
  return rep;
}

}  // namespace

ValidationReport validate_potential(const Potential& V, int points,
                                    double radius) {
  if (radius <= 0.0) radius = V.support_radius;
  return decay_report([&V](const Vec3& x) { return V(x); },
                      5.0 + V.envelope_eps, V.envelope_C, V.support_radius,
                      V.support_tol, points, radius, "potential." + V.name);
}

ValidationReport validate_form_factor(const FormFactor& rho, int points,
                                      double radius) {
  if (radius <= 0.0) radius = rho.support_radius;
  return decay_report([&rho](const Vec3& x) { return std::abs(rho.eval(x)); },
                      4.0 + rho.envelope_eps, rho.envelope_C,
                      rho.support_radius, rho.support_tol, points, radius,
                      "form_factor." + rho.name);
}

namespace {

// rho_hat(xi) = int e^{i xi.x} rho(x) dx on an n^3 midpoint grid over the
// support cube; axis phases are precomputed so each direction costs one
// triple loop over the tabulated source.
std::vector<cplx> transform_on_grid(const FormFactor& rho,
                                    const std::vector<Vec3>& xis, int n) {
  double R = rho.support_radius;
  Grid3 g = Grid3::cube(n, R);
  ScalarField tab = ScalarField::tabulate(g, rho.eval);
  std::vector<cplx> out(xis.size());
  std::vector<cplx> px(static_cast<size_t>(n)), py(static_cast<size_t>(n)),
      pz(static_cast<size_t>(n));
  for (size_t q = 0; q < xis.size(); ++q) {
    const Vec3& xi = xis[q];
    for (int i = 0; i < n; ++i) {
      double c = g.lo[0] + (i + 0.5) * g.h;
      px[size_t(i)] = std::exp(cplx(0.0, xi[0] * c));
      py[size_t(i)] = std::exp(cplx(0.0, xi[1] * c));
      pz[size_t(i)] = std::exp(cplx(0.0, xi[2] * c));
    }
    cplx s = 0.0;
    std::int64_t idx = 0;
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        cplx pxy = px[size_t(ix)] * py[size_t(iy)];
        for (int iz = 0; iz < n; ++iz, ++idx)
          s += tab.values[size_t(idx)] * pxy * pz[size_t(iz)];
      }
    out[q] = s * g.cell_volume();
  }
  return out;
}

std::vector<cplx> refined_transform(const FormFactor& rho,
                                    const std::vector<Vec3>& xis,
                                    double rtol) {
  std::vector<cplx> prev = transform_on_grid(rho, xis, 16);
  for (int n = 32; n <= 256; n *= 2) {
    std::vector<cplx> cur = transform_on_grid(rho, xis, n);
    double diff = 0.0, scale = 1.0;
    for (size_t i = 0; i < xis.size(); ++i) {
      diff = std::max(diff, std::abs(cur[i] - prev[i]));
      scale = std::max(scale, std::abs(cur[i]));
    }
    if (diff <= rtol * scale) return cur;
    prev = std::move(cur);
  }
  throw resolution_error(
      "fourier_transform: source quadrature did not converge");
}

}  // namespace

cplx fourier_transform(const FormFactor& rho, const Vec3& xi, double rtol) {
  return refined_transform(rho, {xi}, rtol)[0];
}

WienerResult wiener_check(const FormFactor& rho, double kmag,
                          const DirectionGrid& dirs, double tol, double rtol) {
  if (kmag <= 0.0) throw config_error("wiener_check: |k| must be > 0");
  std::vector<Vec3> xis;
  xis.reserve(dirs.size());
  for (const Vec3& d : dirs.dirs) xis.push_back(kmag * d);
  WienerResult res;
  res.tol = tol;
  res.rho_hat = refined_transform(rho, xis, rtol);
  res.min_abs = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < res.rho_hat.size(); ++i) {
    double a = std::abs(res.rho_hat[i]);
    if (a < res.min_abs) {
      res.min_abs = a;
      res.argmin = i;
    }
  }
  res.passed = res.min_abs > tol;
  return res;
}

}  // namespace qscat
