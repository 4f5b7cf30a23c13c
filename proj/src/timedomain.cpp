#include "qscat/timedomain.hpp"

#include <cmath>
#include <sstream>
#include <numbers>

namespace qscat {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

double vnorm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}
cplx vdot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// 7-point H_c = -1/2 lap + (V - iW), Dirichlet walls.
struct Stencil {
  std::array<int, 3> n{};
  double inv2h2 = 0.0;  // 1/(2 h^2)
  std::vector<cplx> vw;  // V - iW per cell

  void apply(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    const int nx = n[0], ny = n[1], nz = n[2];
    const double c = inv2h2;
    std::int64_t idx = 0;
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy)
        for (int iz = 0; iz < nz; ++iz, ++idx) {
          cplx nb = 0.0;
          if (ix > 0) nb += in[size_t(idx - std::int64_t(ny) * nz)];
          if (ix + 1 < nx) nb += in[size_t(idx + std::int64_t(ny) * nz)];
          if (iy > 0) nb += in[size_t(idx - nz)];
          if (iy + 1 < ny) nb += in[size_t(idx + nz)];
          if (iz > 0) nb += in[size_t(idx - 1)];
          if (iz + 1 < nz) nb += in[size_t(idx + 1)];
          out[size_t(idx)] = c * (6.0 * in[size_t(idx)] - nb) +
                             vw[size_t(idx)] * in[size_t(idx)];
        }
  }
};

// Unpreconditioned BiCGStab on y = (I + i dt/2 H_c) x; the CN matrix is
// a small perturbation of the identity at dt ~ h^2, so this converges in
// a handful of iterations.
int bicgstab(const Stencil& st, cplx shift, const std::vector<cplx>& b,
             std::vector<cplx>& x, double tol, int max_iter) {
  const size_t n = b.size();
  auto apply = [&st, shift](const std::vector<cplx>& in,
                            std::vector<cplx>& out) {
    st.apply(in, out);
    for (size_t i = 0; i < in.size(); ++i)
      out[i] = in[i] + shift * out[i];
  };
  std::vector<cplx> r(n), rhat(n), p(n, 0.0), v(n, 0.0), s(n), t(n);
  apply(x, r);
  for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  rhat = r;
  const double bnorm = std::max(vnorm(b), 1e-300);
  double rnorm = vnorm(r);
  if (rnorm / bnorm <= tol) return 0;
  cplx rho = 1.0, alpha = 1.0, omega = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    cplx rho1 = vdot(rhat, r);
    if (std::abs(rho1) < 1e-300)
      throw convergence_error("bicgstab: breakdown (rho)");
    if (it == 1) {
      p = r;
    } else {
      cplx beta = (rho1 / rho) * (alpha / omega);
      for (size_t i = 0; i < n; ++i)
        p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    apply(p, v);
    cplx denom = vdot(rhat, v);
    if (std::abs(denom) < 1e-300)
      throw convergence_error("bicgstab: breakdown (alpha)");
    alpha = rho1 / denom;
    for (size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (vnorm(s) / bnorm <= tol) {
      for (size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
      return it;
    }
    apply(s, t);
    cplx tt = vdot(t, t);
    if (std::abs(tt) < 1e-300)
      throw convergence_error("bicgstab: breakdown (omega)");
    omega = vdot(t, s) / tt;
    for (size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i] + omega * s[i];
      r[i] = s[i] - omega * t[i];
    }
    if (vnorm(r) / bnorm <= tol) return it;
    rho = rho1;
  }
  throw convergence_error("bicgstab: no convergence in max_iter");
}

}  // namespace

std::vector<double> absorbing_profile(const Grid3& grid, double fraction,
                                      double W0) {
  if (fraction <= 0.0 || fraction >= 0.9)
    throw config_error("absorbing_profile: fraction outside (0, 0.9)");
  if (W0 < 0.0) throw config_error("absorbing_profile: W0 must be >= 0");
  Vec3 hi = grid.hi();
  Vec3 c = 0.5 * (grid.lo + hi);
  Vec3 half = 0.5 * (hi - grid.lo);
  std::vector<double> W(size_t(grid.size()), 0.0);
  std::int64_t i = 0;
  for (int ix = 0; ix < grid.n[0]; ++ix)
    for (int iy = 0; iy < grid.n[1]; ++iy)
      for (int iz = 0; iz < grid.n[2]; ++iz, ++i) {
        Vec3 x = grid.center(ix, iy, iz);
        double w = 0.0;
        for (int d = 0; d < 3; ++d) {
          double r0 = (1.0 - fraction) * half[size_t(d)];
          double ramp = (std::abs(x[size_t(d)] - c[size_t(d)]) - r0) /
                        (half[size_t(d)] - r0);
          if (ramp > 0.0) w += std::pow(std::min(ramp, 1.0), 4);
        }
        W[size_t(i)] = W0 * w;
      }
  return W;
}

// Plane wave hitting the quartic ramp backed by a Dirichlet wall:
// u'' = -(k^2 + 2iW(x)) u on [0, L], u(L) = 0; reflection is read off
// from the e^{+-ikx} split at x = 0.
double ramp_reflection(double kmag, double L, double W0) {
  auto Wf = [&](double x) { return W0 * std::pow(x / L, 4); };
  auto rhs = [&](double x, cplx u, cplx du, cplx& fu, cplx& fdu) {
    fu = du;
    fdu = -(kmag * kmag + 2.0 * kI * Wf(x)) * u;
  };
  int steps = std::max(4000, int(40.0 * kmag * L));
  double dx = L / steps;
  cplx u = 0.0, du = 1.0;
  double x = L;
  for (int i = 0; i < steps; ++i) {
    cplx k1u, k1d, k2u, k2d, k3u, k3d, k4u, k4d;
    rhs(x, u, du, k1u, k1d);
    rhs(x - dx / 2, u - dx / 2 * k1u, du - dx / 2 * k1d, k2u, k2d);
    rhs(x - dx / 2, u - dx / 2 * k2u, du - dx / 2 * k2d, k3u, k3d);
    rhs(x - dx, u - dx * k3u, du - dx * k3d, k4u, k4d);
    u -= dx / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    du -= dx / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    x -= dx;
  }
  cplx alpha = 0.5 * (u + du / (kI * kmag));
  cplx beta = 0.5 * (u - du / (kI * kmag));
  if (std::abs(alpha) < 1e-300) return 1.0;
  return std::abs(beta / alpha);
}

CapCalibration calibrate_cap(double kmag, double ramp_length) {
  if (kmag <= 0.0 || ramp_length <= 0.0)
    throw config_error("calibrate_cap: k and ramp length must be > 0");
  double best_w = 0.0, best_r = 1.0;
  for (int i = 0; i <= 60; ++i) {
    double W0 = std::pow(10.0, -1.0 + 3.5 * i / 60.0);
    double r = ramp_reflection(kmag, ramp_length, W0);
    if (r < best_r) {
      best_r = r;
      best_w = W0;
    }
  }
  // Golden-section polish around the scan minimum (log axis).
  double lo = std::log10(best_w) - 0.15, hi = std::log10(best_w) + 0.15;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = ramp_reflection(kmag, ramp_length, std::pow(10.0, c));
  double fd = ramp_reflection(kmag, ramp_length, std::pow(10.0, d));
  for (int i = 0; i < 40; ++i) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = ramp_reflection(kmag, ramp_length, std::pow(10.0, c));
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = ramp_reflection(kmag, ramp_length, std::pow(10.0, d));
    }
  }
  double W0 = std::pow(10.0, 0.5 * (lo + hi));
  double r = ramp_reflection(kmag, ramp_length, W0);
  if (best_r < r) {
    W0 = best_w;
    r = best_r;
  }
  return {W0, r};
}

Trajectory evolve(const Potential& V, const FormFactor* rho,
                  const WaveContext& wc, const Grid3& grid,
                  const EvolveParams& params) {
  if (params.t_final <= 0.0)
    throw config_error("evolve: t_final must be > 0");
  const double E = wc.energy();
  const double dt = params.dt > 0.0 ? params.dt : 0.2 * grid.h * grid.h;
  const int steps = int(std::ceil(params.t_final / dt - 1e-12));
  const double period = 2.0 * kPi / E;
  int stride = params.snapshot_stride > 0
                   ? params.snapshot_stride
                   : std::max(1, int(std::floor(period / (16.0 * dt))));

  Trajectory traj;
  traj.grid = grid;
  traj.dt = dt;
  traj.wc = wc;
  traj.steps = steps;

  // CAP on the outer shell; strength from the 1-D model unless pinned.
  Vec3 hi = grid.hi();
  double half = 0.5 * std::min({hi[0] - grid.lo[0], hi[1] - grid.lo[1],
                                hi[2] - grid.lo[2]});
  double W0 = params.cap.strength;
  double ramp_len = params.cap.fraction * half;
  if (W0 >= 0.0) {
    traj.cap_reflection = ramp_reflection(wc.kmag(), ramp_len, W0);
  } else {
    CapCalibration cal = calibrate_cap(wc.kmag(), ramp_len);
    W0 = cal.W0;
    traj.cap_reflection = cal.reflection;
  }
  if (traj.cap_reflection > params.cap.target_reflection) {
    std::ostringstream os;
    os << "absorbing layer: 1-D model reflection " << traj.cap_reflection
       << " above the " << params.cap.target_reflection
       << " design target (ramp k*L = " << wc.kmag() * ramp_len << ")";
    traj.warning = os.str();
  }
  traj.cap_strength = W0;
  traj.damping = absorbing_profile(grid, params.cap.fraction, W0);

  // Driving density rho_q = |q_D| rho(x - q_D); must sit inside the box
  // and clear of the potential support.
  std::vector<cplx> drive(size_t(grid.size()), 0.0);
  if (rho) {
    Vec3 q = wc.q_D();
    if (!grid.contains_box(q - Vec3{rho->support_radius, rho->support_radius,
                                    rho->support_radius},
                           q + Vec3{rho->support_radius, rho->support_radius,
                                    rho->support_radius}))
      throw geometry_error("evolve: shifted source support leaves the box");
    double amp = wc.D > 0.0 ? wc.D : 1.0;
    std::int64_t i = 0;
    for (int ix = 0; ix < grid.n[0]; ++ix)
      for (int iy = 0; iy < grid.n[1]; ++iy)
        for (int iz = 0; iz < grid.n[2]; ++iz, ++i)
          drive[size_t(i)] = amp * rho->eval(grid.center(ix, iy, iz) - q);
  }

  Stencil st;
  st.n = grid.n;
  st.inv2h2 = 1.0 / (2.0 * grid.h * grid.h);
  st.vw.resize(size_t(grid.size()));
  {
    std::int64_t i = 0;
    for (int ix = 0; ix < grid.n[0]; ++ix)
      for (int iy = 0; iy < grid.n[1]; ++iy)
        for (int iz = 0; iz < grid.n[2]; ++iz, ++i)
          st.vw[size_t(i)] = V(grid.center(ix, iy, iz)) -
                             kI * traj.damping[size_t(i)];
  }

  std::vector<cplx> psi(size_t(grid.size()), 0.0);
  if (params.psi0) {
    if (params.psi0->grid.size() != grid.size())
      throw config_error("evolve: psi0 grid mismatch");
    psi = params.psi0->values;
  }

  const cplx shift = kI * (dt / 2.0);
  std::vector<cplx> hpsi(psi.size()), rhsv(psi.size());
  auto source_phase = [E](double t) { return std::exp(-kI * (E * t)); };

  traj.snapshots.push_back({0.0, psi});
  // A priori bound for the damped driven flow: ||psi(t)|| <= ||psi0|| +
  // t ||rho_q||; x10 above it (or NaN) means the step went unstable.
  const double psi0_l2 = vnorm(psi);
  const double drive_l2 = vnorm(drive) * grid.h * std::sqrt(grid.h);
  for (int n = 0; n < steps; ++n) {
    const double tn = n * dt, tn1 = (n + 1) * dt;
    st.apply(psi, hpsi);
    const cplx smid =
        kI * dt * 0.5 * (source_phase(tn) + source_phase(tn1));
    for (size_t i = 0; i < psi.size(); ++i)
      rhsv[i] = psi[i] - shift * hpsi[i] + smid * drive[i];
    int its = bicgstab(st, shift, rhsv, psi, params.solver_tol,
                       params.solver_max_iter);
    traj.max_solver_iters = std::max(traj.max_solver_iters, its);
    if ((n + 1) % stride == 0 || n + 1 == steps) {
      double nn = vnorm(psi) * grid.h * std::sqrt(grid.h);
      double bound =
          10.0 * (psi0_l2 * grid.h * std::sqrt(grid.h) +
                  tn1 * drive_l2 + 1e-12);
      if (!(nn <= bound))
        throw blow_up_error("evolve: norm outside the a priori bound");
      traj.snapshots.push_back({tn1, psi});
    }
  }
  return traj;
}

LimitAmplitudeEstimate extract_limit_amplitude(const Trajectory& traj,
                                               double t0, double t1,
                                               double weight_sigma) {
  if (traj.snapshots.empty())
    throw config_error("extract_limit_amplitude: empty trajectory");
  if (!(t0 < t1))
    throw config_error("extract_limit_amplitude: need t0 < t1");
  const double E = traj.wc.energy();
  LimitAmplitudeEstimate est;
  est.weight_sigma = weight_sigma;
  est.b_hat = ScalarField(traj.grid);

  int used = 0;
  for (const auto& snap : traj.snapshots) {
    if (snap.t < t0 || snap.t > t1) continue;
    cplx ph = std::exp(kI * (E * snap.t));
    for (size_t i = 0; i < snap.psi.size(); ++i)
      est.b_hat.values[i] += ph * snap.psi[i];
    ++used;
  }
  if (used == 0)
    throw config_error("extract_limit_amplitude: window holds no snapshots");
  for (cplx& v : est.b_hat.values) v /= double(used);

  std::vector<std::uint8_t> mask(traj.damping.size());
  for (size_t i = 0; i < mask.size(); ++i)
    mask[i] = traj.damping[i] == 0.0 ? 1 : 0;
  est.b_hat_norm = weighted_l2(est.b_hat, weight_sigma, &mask);

  ScalarField diff(traj.grid);
  for (const auto& snap : traj.snapshots) {
    cplx ph = std::exp(kI * (E * snap.t));
    for (size_t i = 0; i < snap.psi.size(); ++i)
      diff.values[i] = ph * snap.psi[i] - est.b_hat.values[i];
    est.times.push_back(snap.t);
    est.residual.push_back(weighted_l2(diff, weight_sigma, &mask));
  }
  est.tail_ratio = est.residual.back() / std::max(est.b_hat_norm, 1e-300);

  // Per-period residual means over the last 3 driving periods.
  const double period = 2.0 * kPi / E;
  double t_end = est.times.back();
  std::array<double, 3> mean{0, 0, 0};
  std::array<int, 3> cnt{0, 0, 0};
  for (size_t i = 0; i < est.times.size(); ++i) {
    double back = t_end - est.times[i];
    if (back >= 3.0 * period) continue;
    int bucket = std::min(2, int(back / period));
    mean[size_t(2 - bucket)] += est.residual[i];
    cnt[size_t(2 - bucket)] += 1;
  }
  est.tail_decreasing = cnt[0] > 0 && cnt[1] > 0 && cnt[2] > 0;
  if (est.tail_decreasing) {
    for (int b = 0; b < 3; ++b) mean[size_t(b)] /= cnt[size_t(b)];
    // nonincreasing within jitter: the converged tail rings at the
    // absorbing-layer reflection level, so successive period means may
    // wobble a few percent around the trend
    const double jitter = 1.05;
    est.tail_decreasing =
        mean[1] <= jitter * mean[0] && mean[2] <= jitter * mean[1];
  }
  return est;
}

ContinuityResidual continuity_residual(const Trajectory& traj, size_t i,
                                       const FormFactor* rho) {
  if (i + 1 >= traj.snapshots.size())
    throw config_error("continuity_residual: need snapshots i and i+1");
  const Grid3& g = traj.grid;
  const auto& s0 = traj.snapshots[i];
  const auto& s1 = traj.snapshots[i + 1];
  const double dt = s1.t - s0.t;
  const double tm = 0.5 * (s0.t + s1.t);
  const double E = traj.wc.energy();
  const double h = g.h;

  std::vector<cplx> mid(s0.psi.size());
  for (size_t q = 0; q < mid.size(); ++q)
    mid[q] = 0.5 * (s0.psi[q] + s1.psi[q]);

  std::vector<cplx> drive(mid.size(), 0.0);
  if (rho) {
    Vec3 qd = traj.wc.q_D();
    double amp = traj.wc.D > 0.0 ? traj.wc.D : 1.0;
    std::int64_t q = 0;
    for (int ix = 0; ix < g.n[0]; ++ix)
      for (int iy = 0; iy < g.n[1]; ++iy)
        for (int iz = 0; iz < g.n[2]; ++iz, ++q)
          drive[size_t(q)] = amp * rho->eval(g.center(ix, iy, iz) - qd);
  }
  const cplx sphase = std::exp(-kI * (E * tm));

  // Current J_d = Im(conj(psi) d_d psi) by central differences, then a
  // centered divergence of J; both need one-cell halos, so the defect is
  // reported two cells in from the walls (and only where W = 0).
  const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
  auto idx = [&](int ix, int iy, int iz) {
    return (std::int64_t(ix) * ny + iy) * nz + iz;
  };
  auto Jcomp = [&](int ix, int iy, int iz, int d) {
    std::int64_t c = idx(ix, iy, iz);
    std::int64_t p, m;
    if (d == 0) {
      p = idx(ix + 1, iy, iz);
      m = idx(ix - 1, iy, iz);
    } else if (d == 1) {
      p = idx(ix, iy + 1, iz);
      m = idx(ix, iy - 1, iz);
    } else {
      p = idx(ix, iy, iz + 1);
      m = idx(ix, iy, iz - 1);
    }
    cplx grad = (mid[size_t(p)] - mid[size_t(m)]) / (2.0 * h);
    return std::imag(std::conj(mid[size_t(c)]) * grad);
  };

  ContinuityResidual out;
  out.defect = ScalarField(g);
  for (int ix = 2; ix < nx - 2; ++ix)
    for (int iy = 2; iy < ny - 2; ++iy)
      for (int iz = 2; iz < nz - 2; ++iz) {
        std::int64_t c = idx(ix, iy, iz);
        if (traj.damping[size_t(c)] != 0.0) continue;
        double ddt = (std::norm(s1.psi[size_t(c)]) -
                      std::norm(s0.psi[size_t(c)])) /
                     dt;
        double div = (Jcomp(ix + 1, iy, iz, 0) - Jcomp(ix - 1, iy, iz, 0) +
                      Jcomp(ix, iy + 1, iz, 1) - Jcomp(ix, iy - 1, iz, 1) +
                      Jcomp(ix, iy, iz + 1, 2) - Jcomp(ix, iy, iz - 1, 2)) /
                     (2.0 * h);
        double src =
            2.0 * std::imag(std::conj(mid[size_t(c)]) * drive[size_t(c)] *
                            sphase);
        double r = ddt + div + src;
        out.defect.values[size_t(c)] = r;
        out.max_interior = std::max(out.max_interior, std::abs(r));
      }
  return out;
}

}  // namespace qscat
