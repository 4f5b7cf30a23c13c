#include "qscat/stationary.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace qscat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

using ApplyFn = std::function<void(const std::vector<cplx>&,
                                   std::vector<cplx>&)>;

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

struct KrylovResult {
  int iters = 0;
  double relres = 0.0;
  double cond = 0.0;
};

// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
// apply() must compute y = M^{-1} A x; rhs must already be M^{-1} b.
KrylovResult gmres(const ApplyFn& apply, const std::vector<cplx>& rhs,
                   std::vector<cplx>& x, double tol, int restart,
                   int max_iter) {
  const size_t n = rhs.size();
  const double bnorm = std::max(vnorm(rhs), 1e-300);
  KrylovResult res;
  std::vector<std::vector<cplx>> V;
  std::vector<cplx> w(n), r(n);
  Eigen::MatrixXcd H;

  while (res.iters < max_iter) {
    apply(x, r);
    for (size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    double beta = vnorm(r);
    res.relres = beta / bnorm;
    if (res.relres <= tol) break;

    int m = std::min(restart, max_iter - res.iters);
    V.assign(1, r);
    for (cplx& z : V[0]) z /= beta;
    H = Eigen::MatrixXcd::Zero(m + 1, m);
    std::vector<cplx> cs(size_t(m), 0.0), sn(size_t(m), 0.0), g(size_t(m) + 1, 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < m; ++j) {
      apply(V[size_t(j)], w);
      for (int i = 0; i <= j; ++i) {
        cplx hij = vdot(V[size_t(i)], w);
        H(i, j) = hij;
        for (size_t q = 0; q < n; ++q) w[q] -= hij * V[size_t(i)][q];
      }
      double hnext = vnorm(w);
      H(j + 1, j) = hnext;
      // Apply stored rotations G_i = [[conj(c), conj(s)], [-s, c]], then
      // build the new one annihilating H(j+1, j).
      for (int i = 0; i < j; ++i) {
        cplx t = std::conj(cs[size_t(i)]) * H(i, j) +
                 std::conj(sn[size_t(i)]) * H(i + 1, j);
        H(i + 1, j) = -sn[size_t(i)] * H(i, j) + cs[size_t(i)] * H(i + 1, j);
        H(i, j) = t;
      }
      double denom =
          std::sqrt(std::norm(H(j, j)) + std::norm(H(j + 1, j)));
      if (denom < 1e-300) break;  // degenerate column; keep j solved ones
      cs[size_t(j)] = H(j, j) / denom;
      sn[size_t(j)] = H(j + 1, j) / denom;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g[size_t(j) + 1] = -sn[size_t(j)] * g[size_t(j)];
      g[size_t(j)] = std::conj(cs[size_t(j)]) * g[size_t(j)];
      ++res.iters;
      res.relres = std::abs(g[size_t(j) + 1]) / bnorm;
      if (res.relres <= tol || res.iters >= max_iter) {
        ++j;
        break;
      }
      V.push_back(w);
      for (cplx& z : V.back()) z /= hnext;
    }
    // Back-substitute the j x j triangular system.
    std::vector<cplx> y(size_t(j), 0.0);
    for (int i = j - 1; i >= 0; --i) {
      cplx s = g[size_t(i)];
      for (int q = i + 1; q < j; ++q) s -= H(i, q) * y[size_t(q)];
      y[size_t(i)] = s / H(i, i);
    }
    for (int i = 0; i < j; ++i)
      for (size_t q = 0; q < n; ++q) x[q] += y[size_t(i)] * V[size_t(i)][q];
  }

  // Conditioning proxy from the final Hessenberg block.
  if (H.size() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H);
    double smin = svd.singularValues().minCoeff();
    double smax = svd.singularValues().maxCoeff();
    if (smin > 0.0) res.cond = smax / smin;
  }
  return res;
}

// Power-iteration estimate of the spectral radius of v -> R0(V v).
double spectral_radius_estimate(const ApplyFn& applyKV,
                                const std::vector<cplx>& seed, int iters) {
  std::vector<cplx> z = seed, w(seed.size());
  double nz = vnorm(z);
  if (nz == 0.0) return 0.0;
  for (cplx& v : z) v /= nz;
  double rho = 0.0;
  for (int i = 0; i < iters; ++i) {
    applyKV(z, w);
    rho = vnorm(w);
    if (rho < 1e-300) return 0.0;
    for (size_t q = 0; q < z.size(); ++q) z[q] = w[q] / rho;
  }
  return rho;
}

struct OperatorBundle {
  std::vector<double> Vvals;
  std::unique_ptr<GridConvolver> conv;
  std::vector<cplx> scratch;

  // y = x + R0(V x)
  void full(const std::vector<cplx>& x, std::vector<cplx>& y) {
    scratch.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) scratch[i] = Vvals[i] * x[i];
    conv->apply(scratch, y);
    for (size_t i = 0; i < x.size(); ++i) y[i] += x[i];
  }
  // y = R0(V x)
  void kv(const std::vector<cplx>& x, std::vector<cplx>& y) {
    scratch.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) scratch[i] = Vvals[i] * x[i];
    conv->apply(scratch, y);
  }
};

LSSolution solve_common(const Potential& V, const WaveContext& wc,
                        const Grid3& grid, ScalarField incident,
                        IncidentKind kind, const SolveOptions& opts) {
  LSSolution sol;
  sol.wc = wc;
  sol.kind = kind;
  sol.incident = incident;

  const std::int64_t N = grid.size();
  std::vector<double> Vvals(size_t(N), 0.0);
  {
    std::int64_t i = 0;
    double vmax = 0.0;
    for (int ix = 0; ix < grid.n[0]; ++ix)
      for (int iy = 0; iy < grid.n[1]; ++iy)
        for (int iz = 0; iz < grid.n[2]; ++iz, ++i) {
          Vvals[size_t(i)] = V(grid.center(ix, iy, iz));
          vmax = std::max(vmax, std::abs(Vvals[size_t(i)]));
        }
    if (vmax == 0.0) {
      // Free case: A = incident exactly; the residual is identically 0
      // because V A vanishes cell by cell.
      sol.field = std::move(incident);
      sol.method = "born";
      sol.iterations = 1;
      sol.residual = 0.0;
      return sol;
    }
  }
  if (!grid.contains_box({-V.support_radius, -V.support_radius,
                          -V.support_radius},
                         {V.support_radius, V.support_radius,
                          V.support_radius}))
    throw geometry_error("solve: grid box does not cover the potential "
                         "support cube");

  OperatorBundle op;
  op.Vvals = std::move(Vvals);
  op.conv = std::make_unique<GridConvolver>(wc.energy(), grid);

  SolveMethod method = opts.method;
  if (method == SolveMethod::kAuto)
    method = N <= opts.lu_threshold ? SolveMethod::kDenseLU
                                    : SolveMethod::kGMRES;

  const std::vector<cplx>& b = sol.incident.values;
  std::vector<cplx> x;

  if (method == SolveMethod::kDenseLU) {
    if (N > opts.lu_threshold)
      throw config_error("solve: dense LU requested above lu_threshold");
    KernelMatrix km = KernelMatrix::assemble(wc.energy(), grid,
                                             grid.centers());
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(N, N);
    for (std::int64_t r = 0; r < N; ++r)
      for (std::int64_t c = 0; c < N; ++c)
        M(r, c) += km.entries[size_t(r) * size_t(N) + size_t(c)] *
                   op.Vvals[size_t(c)];
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    Eigen::VectorXcd rhs(N);
    for (std::int64_t i = 0; i < N; ++i) rhs(i) = b[size_t(i)];
    Eigen::VectorXcd sol_v = lu.solve(rhs);
    x.assign(size_t(N), 0.0);
    for (std::int64_t i = 0; i < N; ++i) x[size_t(i)] = sol_v(i);
    sol.method = "lu";
    sol.iterations = 1;
    double rc = lu.rcond();
    sol.cond_estimate = rc > 0.0 ? 1.0 / rc : 0.0;
    if (rc < 1e-10)
      sol.warning = "dense system is badly conditioned (rcond " +
                    std::to_string(rc) + "); near-trapping energy?";
  } else if (method == SolveMethod::kBorn) {
    ApplyFn kv = [&op](const std::vector<cplx>& in, std::vector<cplx>& out) {
      op.kv(in, out);
    };
    double rho_est = spectral_radius_estimate(kv, b, 20);
    if (rho_est >= opts.born_radius_limit)
      throw convergence_error(
          "Born iteration refused: spectral radius estimate " +
          std::to_string(rho_est));
    x = b;
    std::vector<cplx> next(b.size());
    double bn = std::max(vnorm(b), 1e-300);
    int it = 0;
    for (; it < opts.max_iter; ++it) {
      op.kv(x, next);
      double diff = 0.0;
      for (size_t i = 0; i < x.size(); ++i) {
        next[i] = b[i] - next[i];
        diff += std::norm(next[i] - x[i]);
      }
      x.swap(next);
      if (std::sqrt(diff) / bn <= opts.tol) break;
    }
    sol.method = "born";
    sol.iterations = it + 1;
    if (it >= opts.max_iter)
      throw convergence_error("Born iteration did not reach tol");
  } else {
    // Left-preconditioned GMRES; M = diag(I + R0 V) which is 1 + corr*V.
    const cplx corr = diagonal_correction(wc.energy(), grid.h);
    std::vector<cplx> minv(size_t(N), 0.0);
    for (std::int64_t i = 0; i < N; ++i)
      minv[size_t(i)] = 1.0 / (1.0 + corr * op.Vvals[size_t(i)]);
    ApplyFn apply = [&op, &minv](const std::vector<cplx>& in,
                                 std::vector<cplx>& out) {
      op.full(in, out);
      for (size_t i = 0; i < out.size(); ++i) out[i] *= minv[i];
    };
    std::vector<cplx> rhs(b.size());
    for (size_t i = 0; i < b.size(); ++i) rhs[i] = minv[i] * b[i];
    x = rhs;  // first Born sweep as the initial guess
    KrylovResult kr = gmres(apply, rhs, x, opts.tol, opts.restart,
                            opts.max_iter);
    sol.method = "gmres";
    sol.iterations = kr.iters;
    sol.cond_estimate = kr.cond;
    if (kr.relres > opts.tol)
      throw convergence_error("GMRES stalled at relative residual " +
                              std::to_string(kr.relres));
    if (kr.cond > 1e8)
      sol.warning = "Krylov conditioning estimate " +
                    std::to_string(kr.cond) + "; near-trapping energy?";
  }

  // True (unpreconditioned) relative residual.
  std::vector<cplx> Ax(x.size());
  op.full(x, Ax);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += std::norm(Ax[i] - b[i]);
    den += std::norm(b[i]);
  }
  sol.residual = std::sqrt(num / std::max(den, 1e-300));
  sol.field = ScalarField(grid, std::move(x));
  return sol;
}

}  // namespace

LSSolution solve_plane(const Potential& V, const WaveContext& wc,
                       const Grid3& grid, const SolveOptions& opts) {
  ScalarField inc = ScalarField::tabulate(grid, [&wc](const Vec3& x) {
    return std::exp(kI * dot(wc.k, x));
  });
  return solve_common(V, wc, grid, std::move(inc), IncidentKind::kPlane,
                      opts);
}

LSSolution solve_spherical(const Potential& V, const FormFactor& rho,
                           const WaveContext& wc, const Grid3& grid,
                           const SolveOptions& opts) {
  if (wc.D <= 0.0)
    throw config_error("solve_spherical: emitter distance D must be > 0");
  std::vector<cplx> inc_vals =
      incident_spherical(rho, wc, grid.centers(), 1e-7);
  ScalarField inc(grid, std::move(inc_vals));
  return solve_common(V, wc, grid, std::move(inc), IncidentKind::kSpherical,
                      opts);
}

LSSolution solve_driven(const Potential& V, const FormFactor& rho,
                        const WaveContext& wc, const Grid3& grid,
                        const SolveOptions& opts) {
  const Vec3 q = wc.q_D();
  const double rs = rho.support_radius;
  if (!grid.contains_box(q - Vec3{rs, rs, rs}, q + Vec3{rs, rs, rs}))
    throw geometry_error("solve_driven: shifted source support leaves the box");
  const double amp = wc.D > 0.0 ? wc.D : 1.0;
  ScalarField rho_q = ScalarField::tabulate(
      grid, [&](const Vec3& x) { return amp * rho.eval(x - q); });
  GridConvolver conv(wc.energy(), grid);
  std::vector<cplx> inc_vals;
  conv.apply(rho_q.values, inc_vals);
  ScalarField inc(grid, std::move(inc_vals));
  return solve_common(V, wc, grid, std::move(inc), IncidentKind::kSpherical,
                      opts);
}

cplx normalization_bD(const FormFactor& rho, const WaveContext& wc,
                      double wiener_tol) {
  const double k = wc.kmag();
  const Vec3 xi = (-k) * wc.unit();
  cplx b = fourier_transform(rho, xi) / (2.0 * kPi);
  if (std::abs(b) <= wiener_tol)
    throw degenerate_source_error(
        "normalization_bD: |b(n)| below the Wiener floor");
  return b * std::exp(kI * (k * wc.D));
}

ScalarField normalized_AD(const LSSolution& sol, const FormFactor& rho,
                          double wiener_tol) {
  if (sol.kind != IncidentKind::kSpherical)
    throw config_error("normalized_AD: solution is not spherical-incident");
  cplx bD = normalization_bD(rho, sol.wc, wiener_tol);
  ScalarField out = sol.field;
  for (cplx& v : out.values) v /= bD;
  return out;
}

namespace {

ScalarField interaction_density(const Potential& V, const ScalarField& A) {
  ScalarField d = A;
  std::int64_t i = 0;
  const Grid3& g = d.grid;
  for (int ix = 0; ix < g.n[0]; ++ix)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int iz = 0; iz < g.n[2]; ++iz, ++i)
        d.values[size_t(i)] *= V(g.center(ix, iy, iz));
  return d;
}

AmplitudeTable amplitude_of_field(const Potential& V, const ScalarField& A,
                                  const WaveContext& wc,
                                  const DirectionGrid& dirs) {
  ScalarField d = interaction_density(V, A);
  FarField ff = far_field_coefficient(wc.energy(), d, dirs);
  AmplitudeTable t;
  t.dirs = dirs;
  t.wc = wc;
  t.a.resize(dirs.size());
  t.sigma.resize(dirs.size());
  for (size_t j = 0; j < dirs.size(); ++j) {
    t.a[j] = -ff.phi[j];
    t.sigma[j] = std::norm(t.a[j]);
  }
  return t;
}

}  // namespace

double AmplitudeTable::total_cross_section() const {
  double s = 0.0;
  for (size_t j = 0; j < sigma.size(); ++j) s += dirs.weights[j] * sigma[j];
  return s;
}

AmplitudeTable amplitude(const Potential& V, const LSSolution& sol,
                         const DirectionGrid& dirs) {
  if (sol.kind != IncidentKind::kPlane)
    throw config_error(
        "amplitude: spherical solutions must be normalized first "
        "(amplitude_normalized)");
  return amplitude_of_field(V, sol.field, sol.wc, dirs);
}

AmplitudeTable amplitude_normalized(const Potential& V, const LSSolution& sol,
                                    const FormFactor& rho,
                                    const DirectionGrid& dirs) {
  ScalarField AD = normalized_AD(sol, rho);
  return amplitude_of_field(V, AD, sol.wc, dirs);
}

TMatrixValue t_matrix(const Potential& V, const LSSolution& sol,
                      const Vec3& theta) {
  if (sol.kind != IncidentKind::kPlane)
    throw config_error("t_matrix: plane-incident solution required");
  // Deliberately its own quadrature loop (not a call into amplitude) so
  // the a = -4 pi^2 T identity is a real cross-check of two code paths.
  const Grid3& g = sol.field.grid;
  const double k = sol.wc.kmag();
  cplx I = 0.0;
  std::int64_t i = 0;
  for (int ix = 0; ix < g.n[0]; ++ix)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int iz = 0; iz < g.n[2]; ++iz, ++i) {
        Vec3 y = g.center(ix, iy, iz);
        I += std::exp(-kI * (k * dot(theta, y))) * V(y) *
             sol.field.values[size_t(i)];
      }
  I *= g.cell_volume();
  TMatrixValue tv;
  tv.theta = theta;
  tv.T = I / std::pow(2.0 * kPi, 3);
  tv.a = -I / (2.0 * kPi);
  return tv;
}

double loglog_slope(const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw config_error("loglog_slope: need matched series, length >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]);
    double ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport convergence_study(const Potential& V, const FormFactor& rho,
                                    const Vec3& k,
                                    const std::vector<double>& Ds,
                                    const Grid3& grid,
                                    const DirectionGrid& dirs,
                                    const SolveOptions& opts,
                                    double weight_sigma) {
  if (Ds.size() < 2)
    throw config_error("convergence_study: need >= 2 distances");
  for (size_t i = 1; i < Ds.size(); ++i)
    if (Ds[i] <= Ds[i - 1])
      throw config_error("convergence_study: distances must increase");

  WaveContext wc_plane(k);
  LSSolution plane = solve_plane(V, wc_plane, grid, opts);
  AmplitudeTable amp_plane = amplitude(V, plane, dirs);
  double a_scale = 0.0;
  for (const cplx& a : amp_plane.a) a_scale = std::max(a_scale, std::abs(a));

  ScalarField Aw = plane.field;
  double norm_A = weighted_l2(Aw, weight_sigma);

  ConvergenceReport rep;
  rep.D = Ds;
  for (double D : Ds) {
    WaveContext wc(k, D);
    LSSolution sph = solve_spherical(V, rho, wc, grid, opts);
    cplx bD = normalization_bD(rho, wc);

    double e_inc = 0.0;
    {
      std::int64_t i = 0;
      for (int ix = 0; ix < grid.n[0]; ++ix)
        for (int iy = 0; iy < grid.n[1]; ++iy)
          for (int iz = 0; iz < grid.n[2]; ++iz, ++i) {
            cplx pw = std::exp(kI * dot(k, grid.center(ix, iy, iz)));
            e_inc = std::max(
                e_inc, std::abs(sph.incident.values[size_t(i)] / bD - pw));
          }
    }
    rep.err_incident.push_back(e_inc);

    ScalarField AD = sph.field;
    for (size_t i = 0; i < AD.values.size(); ++i)
      AD.values[i] = AD.values[i] / bD - plane.field.values[i];
    rep.err_field.push_back(weighted_l2(AD, weight_sigma) /
                            std::max(norm_A, 1e-300));

    AmplitudeTable amp_D = amplitude_normalized(V, sph, rho, dirs);
    double e_amp = 0.0;
    for (size_t j = 0; j < dirs.size(); ++j)
      e_amp = std::max(e_amp, std::abs(amp_D.a[j] - amp_plane.a[j]));
    rep.err_amp.push_back(e_amp);
  }

  rep.slope_incident = loglog_slope(rep.D, rep.err_incident);
  rep.slope_field = loglog_slope(rep.D, rep.err_field);
  rep.slope_amp = loglog_slope(rep.D, rep.err_amp);
  rep.monotone_field = true;
  rep.monotone_amp = true;
  for (size_t i = 1; i < rep.D.size(); ++i) {
    rep.monotone_field =
        rep.monotone_field && rep.err_field[i] < rep.err_field[i - 1];
    rep.monotone_amp =
        rep.monotone_amp && rep.err_amp[i] < rep.err_amp[i - 1];
  }
  return rep;
}

}  // namespace qscat
