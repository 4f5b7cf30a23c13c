#include "qscat/oracle.hpp"

#include <cmath>
#include <numbers>

namespace qscat {

namespace {

constexpr cplx kI{0.0, 1.0};

// Radial Numerov sweep of u'' = (2V + l(l+1)/r^2 - k^2) u with the
// regular start u ~ r^{l+1}; returns samples of u on r_i = i*h.
std::vector<double> numerov(const Potential& V, double k2, int l, double h,
                            int steps) {
  std::vector<double> u(size_t(steps) + 1, 0.0);
  auto Q = [&](int i) {
    double r = i * h;
    if (i == 0) return 0.0;  // never used with the r^{l+1} start
    return k2 - 2.0 * V.radial(r) - double(l) * (l + 1) / (r * r);
  };
  u[0] = 0.0;
  u[1] = std::pow(h, l + 1.0);
  if (u[1] == 0.0) u[1] = 1e-280;  // high-l underflow guard
  double h2 = h * h;
  for (int i = 1; i < steps; ++i) {
    double a = 1.0 + h2 * Q(i + 1) / 12.0;
    double b = 2.0 * (1.0 - 5.0 * h2 * Q(i) / 12.0);
    double c = 1.0 + h2 * Q(i - 1) / 12.0;
    u[size_t(i) + 1] = (b * u[size_t(i)] - c * u[size_t(i) - 1]) / a;
    if (std::abs(u[size_t(i) + 1]) > 1e200) {
      for (int j = 0; j <= i + 1; ++j) u[size_t(j)] *= 1e-200;
    }
  }
  return u;
}

double riccati_j(int l, double x) { return x * std::sph_bessel(unsigned(l), x); }
double riccati_y(int l, double x) { return x * std::sph_neumann(unsigned(l), x); }

double phase_from_match(double k, int l, double r1, double u1, double r2,
                        double u2) {
  double g = u2 / u1;
  double num = riccati_j(l, k * r2) - g * riccati_j(l, k * r1);
  double den = riccati_y(l, k * r2) - g * riccati_y(l, k * r1);
  // single-energy matching fixes delta only mod pi (e^{i delta} sin delta
  // is pi-periodic); report the representative in (-pi/2, pi/2]
  double d = std::atan2(num, den);
  if (d > 0.5 * std::numbers::pi) d -= std::numbers::pi;
  if (d <= -0.5 * std::numbers::pi) d += std::numbers::pi;
  return d;
}

double born_phase(const Potential& V, double k, int l, double h, int steps) {
  // delta_B = -2k int V(r) j_l(kr)^2 r^2 dr, composite Simpson.
  auto f = [&](int i) {
    double r = i * h;
    if (r == 0.0) return 0.0;
    double j = std::sph_bessel(unsigned(l), k * r);
    return V.radial(r) * j * j * r * r;
  };
  double s = 0.0;
  int n = steps % 2 == 0 ? steps : steps - 1;
  for (int i = 0; i < n; i += 2)
    s += h / 3.0 * (f(i) + 4.0 * f(i + 1) + f(i + 2));
  return -2.0 * k * s;
}

}  // namespace

PhaseShiftSet phase_shifts(const Potential& V, double k, int l_max,
                           double r_grid_h) {
  if (k <= 0.0) throw config_error("phase_shifts: k must be > 0");
  if (r_grid_h <= 0.0) throw config_error("phase_shifts: bad radial step");
  const double r_max = V.support_radius + 2.0;
  const int steps = int(std::ceil(r_max / r_grid_h));
  const int i1 = steps - 60, i2 = steps - 2;
  if (i1 < 10) throw config_error("phase_shifts: radial grid too coarse");

  PhaseShiftSet ps;
  ps.k = k;
  ps.r_match = i2 * r_grid_h;
  const int cap = l_max >= 0 ? l_max : 60;
  int quiet = 0;
  for (int l = 0; l <= cap; ++l) {
    std::vector<double> u = numerov(V, k * k, l, r_grid_h, steps);
    double d = 0.0;
    if (u[size_t(i1)] != 0.0)
      d = phase_from_match(k, l, i1 * r_grid_h, u[size_t(i1)],
                           i2 * r_grid_h, u[size_t(i2)]);
    ps.delta.push_back(d);
    ps.delta_born.push_back(born_phase(V, k, l, r_grid_h, steps));
    if (l_max < 0) {
      quiet = std::abs(d) < 1e-12 ? quiet + 1 : 0;
      if (quiet >= 2) break;
    }
  }
  ps.l_max = int(ps.delta.size()) - 1;
  return ps;
}

cplx partial_wave_amplitude(const PhaseShiftSet& ps, double cos_theta) {
  if (std::abs(cos_theta) > 1.0 + 1e-12)
    throw config_error("partial_wave_amplitude: |cos theta| > 1");
  cos_theta = std::clamp(cos_theta, -1.0, 1.0);
  cplx f = 0.0;
  for (int l = 0; l <= ps.l_max; ++l) {
    double d = ps.delta[size_t(l)];
    f += (2.0 * l + 1.0) * std::exp(kI * d) * std::sin(d) *
         std::legendre(unsigned(l), cos_theta);
  }
  return f / ps.k;
}

int bound_state_count(const Potential& V, int l_max) {
  const double h = 1e-3;
  const double r_max = V.support_radius + 2.0;
  const int steps = int(std::ceil(r_max / h));
  int total = 0;
  for (int l = 0; l <= l_max; ++l) {
    std::vector<double> u = numerov(V, 0.0, l, h, steps);
    int nodes = 0;
    for (int i = 2; i < steps; ++i)
      if (u[size_t(i)] != 0.0 && u[size_t(i) + 1] * u[size_t(i)] < 0.0)
        ++nodes;
    if (nodes == 0) break;  // node counts fall off monotonically in l
    total += (2 * l + 1) * nodes;
  }
  return total;
}

}  // namespace qscat
