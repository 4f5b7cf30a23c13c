#include "qscat/resolvent.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

#include "qscat/stationary.hpp"

namespace qscat {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

double kmag_of(double E_k) {
  if (E_k < 0.0) throw config_error("resolvent: E_k must be >= 0");
  return std::sqrt(2.0 * E_k);
}
}  // namespace

cplx resolvent_kernel(double E_k, const Vec3& x, const Vec3& y) {
  double r = norm(x - y);
  if (r < 1e-14)
    throw singular_point_error("resolvent_kernel: coincident points");
  double k = kmag_of(E_k);
  return std::exp(kI * (k * r)) / (2.0 * kPi * r);
}

cplx diagonal_correction(double E_k, double h) {
  if (h <= 0.0) throw config_error("diagonal_correction: h must be > 0");
  double k = kmag_of(E_k);
  double a = std::cbrt(3.0 * h * h * h / (4.0 * kPi));
  double s = k * a;
  if (s < 1e-3) {
    // (2/k^2)(e^{is}(1-is) - 1) = a^2 (1 + 2is/3 - s^2/4 - is^3/15 + ...)
    return a * a *
           cplx(1.0 - s * s / 4.0 + s * s * s * s / 72.0,
                2.0 * s / 3.0 - s * s * s / 15.0);
  }
  return 2.0 / (k * k) * (std::exp(kI * s) * cplx(1.0, -s) - 1.0);
}

// ---------------------------------------------------------------------------
// Dense Nystrom matrix

KernelMatrix KernelMatrix::assemble(double E_k, const Grid3& source,
                                    const std::vector<Vec3>& targets) {
  KernelMatrix m;
  m.source = source;
  m.targets = targets;
  m.E_k = E_k;
  const std::int64_t n = source.size();
  if (double(targets.size()) * double(n) * 16.0 > 2.0e9)
    throw config_error("KernelMatrix: dense assembly above the memory cap");
  m.entries.resize(targets.size() * size_t(n));
  const double vol = source.cell_volume();
  const cplx diag = diagonal_correction(E_k, source.h);
  const double self = 0.5 * source.h;
  std::vector<Vec3> cells = source.centers();
  for (size_t t = 0; t < targets.size(); ++t) {
    cplx* row = m.entries.data() + t * size_t(n);
    for (std::int64_t j = 0; j < n; ++j) {
      double r = norm(targets[t] - cells[size_t(j)]);
      row[j] = r < self ? diag : vol * resolvent_kernel(E_k, targets[t],
                                                        cells[size_t(j)]);
    }
  }
  return m;
}

std::vector<cplx> KernelMatrix::apply(const std::vector<cplx>& density) const {
  const std::int64_t n = source.size();
  if (std::int64_t(density.size()) != n)
    throw config_error("KernelMatrix::apply: density size mismatch");
  std::vector<cplx> out(targets.size(), cplx(0.0));
  for (size_t t = 0; t < targets.size(); ++t) {
    const cplx* row = entries.data() + t * size_t(n);
    cplx s = 0.0;
    for (std::int64_t j = 0; j < n; ++j) s += row[j] * density[size_t(j)];
    out[t] = s;
  }
  return out;
}

std::vector<cplx> apply_R0(double E_k, const ScalarField& density,
                           const std::vector<Vec3>& targets) {
  const Grid3& g = density.grid;
  const double vol = g.cell_volume();
  const cplx diag = diagonal_correction(E_k, g.h);
  const double self = 0.5 * g.h;
  const double k = kmag_of(E_k);
  std::vector<cplx> out(targets.size(), cplx(0.0));
  for (size_t t = 0; t < targets.size(); ++t) {
    const Vec3& x = targets[t];
    cplx s = 0.0;
    std::int64_t idx = 0;
    for (int ix = 0; ix < g.n[0]; ++ix)
      for (int iy = 0; iy < g.n[1]; ++iy)
        for (int iz = 0; iz < g.n[2]; ++iz, ++idx) {
          const cplx rho = density.values[size_t(idx)];
          if (rho == cplx(0.0)) continue;
          Vec3 y = g.center(ix, iy, iz);
          double r = norm(x - y);
          if (r < self) {
            s += diag * rho;
          } else {
            s += std::polar(vol / (2.0 * kPi * r), k * r) * rho;
          }
        }
    out[t] = s;
  }
  return out;
}

FieldAndGrad apply_R0_grad(double E_k, const ScalarField& density,
                           const std::vector<Vec3>& targets) {
  const Grid3& g = density.grid;
  const double vol = g.cell_volume();
  const double self = 0.5 * g.h;
  const double k = kmag_of(E_k);
  FieldAndGrad out;
  out.value.assign(targets.size(), cplx(0.0));
  out.grad.assign(targets.size(), {cplx(0.0), cplx(0.0), cplx(0.0)});
  for (size_t t = 0; t < targets.size(); ++t) {
    const Vec3& x = targets[t];
    cplx s = 0.0;
    std::array<cplx, 3> gs{cplx(0.0), cplx(0.0), cplx(0.0)};
    std::int64_t idx = 0;
    for (int ix = 0; ix < g.n[0]; ++ix)
      for (int iy = 0; iy < g.n[1]; ++iy)
        for (int iz = 0; iz < g.n[2]; ++iz, ++idx) {
          const cplx rho = density.values[size_t(idx)];
          if (rho == cplx(0.0)) continue;
          Vec3 y = g.center(ix, iy, iz);
          Vec3 d = x - y;
          double r = norm(d);
          if (r < self)
            throw geometry_error(
                "apply_R0_grad: target inside the source support");
          cplx ker = vol * std::exp(kI * (k * r)) / (2.0 * kPi * r);
          s += ker * rho;
          cplx rad = ker * rho * (kI * k - 1.0 / r) / r;
          for (int c = 0; c < 3; ++c) gs[size_t(c)] += rad * d[size_t(c)];
        }
    out.value[t] = s;
    out.grad[t] = gs;
  }
  return out;
}

// ---------------------------------------------------------------------------
// FFT Toeplitz apply on the source grid itself

struct GridConvolver::Impl {
  std::array<int, 3> pn{};  // padded dims (2n per axis)
  std::vector<cplx> khat;   // DFT of the tabulated kernel column
  fftw_plan fwd = nullptr, bwd = nullptr;
  std::vector<cplx> buf;

  ~Impl() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

GridConvolver::GridConvolver(double E_k, const Grid3& grid)
    : impl_(new Impl), grid_(grid), E_k_(E_k) {
  auto& im = *impl_;
  for (int d = 0; d < 3; ++d) im.pn[size_t(d)] = 2 * grid.n[size_t(d)];
  const std::int64_t pnn =
      std::int64_t(im.pn[0]) * im.pn[1] * im.pn[2];
  im.buf.assign(size_t(pnn), cplx(0.0));
  im.fwd = fftw_plan_dft_3d(im.pn[0], im.pn[1], im.pn[2],
                            reinterpret_cast<fftw_complex*>(im.buf.data()),
                            reinterpret_cast<fftw_complex*>(im.buf.data()),
                            FFTW_FORWARD, FFTW_ESTIMATE);
  im.bwd = fftw_plan_dft_3d(im.pn[0], im.pn[1], im.pn[2],
                            reinterpret_cast<fftw_complex*>(im.buf.data()),
                            reinterpret_cast<fftw_complex*>(im.buf.data()),
                            FFTW_BACKWARD, FFTW_ESTIMATE);

  // Kernel column for displacements d = (dx,dy,dz)*h, each in
  // (-n, n); index m in the padded axis encodes displacement m (m < n)
  // or m - 2n (m >= n).
  const double h = grid.h;
  const double vol = h * h * h;
  const double k = kmag_of(E_k);
  const cplx diag = diagonal_correction(E_k, h);
  for (int ix = 0; ix < im.pn[0]; ++ix) {
    int dx = ix < grid.n[0] ? ix : ix - im.pn[0];
    for (int iy = 0; iy < im.pn[1]; ++iy) {
      int dy = iy < grid.n[1] ? iy : iy - im.pn[1];
      std::int64_t base = (std::int64_t(ix) * im.pn[1] + iy) * im.pn[2];
      for (int iz = 0; iz < im.pn[2]; ++iz) {
        int dz = iz < grid.n[2] ? iz : iz - im.pn[2];
        double r = h * std::sqrt(double(dx) * dx + double(dy) * dy +
                                 double(dz) * dz);
        im.buf[size_t(base + iz)] =
            (dx == 0 && dy == 0 && dz == 0)
                ? diag
                : vol * std::exp(kI * (k * r)) / (2.0 * kPi * r);
      }
    }
  }
  fftw_execute(im.fwd);
  im.khat.assign(im.buf.begin(), im.buf.end());
}

GridConvolver::~GridConvolver() = default;

void GridConvolver::apply(const std::vector<cplx>& density,
                          std::vector<cplx>& out) const {
  auto& im = *impl_;
  const auto& n = grid_.n;
  if (std::int64_t(density.size()) != grid_.size())
    throw config_error("GridConvolver::apply: density size mismatch");
  std::fill(im.buf.begin(), im.buf.end(), cplx(0.0));
  for (int ix = 0; ix < n[0]; ++ix)
    for (int iy = 0; iy < n[1]; ++iy) {
      const cplx* src =
          density.data() + (std::int64_t(ix) * n[1] + iy) * n[2];
      cplx* dst =
          im.buf.data() + (std::int64_t(ix) * im.pn[1] + iy) * im.pn[2];
      std::copy(src, src + n[2], dst);
    }
  fftw_execute(im.fwd);
  const double scale =
      1.0 / (double(im.pn[0]) * im.pn[1] * im.pn[2]);
  for (size_t i = 0; i < im.buf.size(); ++i) im.buf[i] *= im.khat[i] * scale;
  fftw_execute(im.bwd);
  out.resize(size_t(grid_.size()));
  for (int ix = 0; ix < n[0]; ++ix)
    for (int iy = 0; iy < n[1]; ++iy) {
      const cplx* src =
          im.buf.data() + (std::int64_t(ix) * im.pn[1] + iy) * im.pn[2];
      cplx* dst = out.data() + (std::int64_t(ix) * n[1] + iy) * n[2];
      std::copy(src, src + n[2], dst);
    }
}

// ---------------------------------------------------------------------------
// Incident spherical wave

std::vector<cplx> incident_spherical(const FormFactor& rho,
                                     const WaveContext& wc,
                                     const std::vector<Vec3>& targets,
                                     double rtol) {
  if (wc.D <= 0.0)
    throw config_error("incident_spherical: emitter distance D must be > 0");
  const Vec3 q = wc.q_D();
  const double R = rho.support_radius;
  for (const Vec3& t : targets)
    if (norm_inf(t - q) <= R)
      throw geometry_error(
          "incident_spherical: target inside the shifted source support");

  const double E_k = wc.energy();
  std::vector<Vec3> shifted;
  shifted.reserve(targets.size());
  for (const Vec3& t : targets) shifted.push_back(t - q);

  // Pick the quadrature level on a spread subsample (the midpoint-rule
  // error varies smoothly over targets), then run the full set once.
  std::vector<Vec3> probes;
  size_t stride = std::max<size_t>(1, shifted.size() / 64);
  for (size_t i = 0; i < shifted.size(); i += stride)
    probes.push_back(shifted[i]);
  bool probes_are_all = probes.size() == shifted.size();

  int accepted = 0;
  std::vector<cplx> prev, cur;
  for (int n = 16; n <= 256; n *= 2) {
    Grid3 g = Grid3::cube(n, R);
    ScalarField tab = ScalarField::tabulate(g, rho.eval);
    cur = apply_R0(E_k, tab, probes);
    if (!prev.empty()) {
      double diff = 0.0, scale = 0.0;
      for (size_t i = 0; i < cur.size(); ++i) {
        diff = std::max(diff, std::abs(cur[i] - prev[i]));
        scale = std::max(scale, std::abs(cur[i]));
      }
      if (diff <= 0.25 * rtol * std::max(scale, 1e-300)) {
        accepted = n;
        break;
      }
    }
    prev = std::move(cur);
  }
  if (accepted == 0)
    throw resolution_error(
        "incident_spherical: source quadrature did not converge");

  if (!probes_are_all) {
    Grid3 g = Grid3::cube(accepted, R);
    ScalarField tab = ScalarField::tabulate(g, rho.eval);
    cur = apply_R0(E_k, tab, shifted);
  }
  for (cplx& v : cur) v *= wc.D;  // the |q_D| amplitude factor
  return cur;
}

// ---------------------------------------------------------------------------
// Far field

FarField far_field_coefficient(double E_k, const ScalarField& density,
                               const DirectionGrid& dirs) {
  FarField ff;
  ff.dirs = dirs;
  ff.E_k = E_k;
  const double k = kmag_of(E_k);
  const Grid3& g = density.grid;
  ff.phi.resize(dirs.size());
  // Axis-factorized phases, one pass per direction.
  std::vector<cplx> px(size_t(g.n[0])), py(size_t(g.n[1])),
      pz(size_t(g.n[2]));
  for (size_t q = 0; q < dirs.size(); ++q) {
    const Vec3 xi = (-k) * dirs.dirs[q];
    for (int i = 0; i < g.n[0]; ++i)
      px[size_t(i)] = std::exp(cplx(0.0, xi[0] * (g.lo[0] + (i + 0.5) * g.h)));
    for (int i = 0; i < g.n[1]; ++i)
      py[size_t(i)] = std::exp(cplx(0.0, xi[1] * (g.lo[1] + (i + 0.5) * g.h)));
    for (int i = 0; i < g.n[2]; ++i)
      pz[size_t(i)] = std::exp(cplx(0.0, xi[2] * (g.lo[2] + (i + 0.5) * g.h)));
    cplx s = 0.0;
    std::int64_t idx = 0;
    for (int ix = 0; ix < g.n[0]; ++ix)
      for (int iy = 0; iy < g.n[1]; ++iy) {
        cplx pxy = px[size_t(ix)] * py[size_t(iy)];
        for (int iz = 0; iz < g.n[2]; ++iz, ++idx)
          s += density.values[size_t(idx)] * pxy * pz[size_t(iz)];
      }
    ff.phi[q] = s * g.cell_volume() / (2.0 * kPi);
  }
  return ff;
}

RemainderProbe far_field_remainder_probe(double E_k,
                                         const ScalarField& density,
                                         const Vec3& theta,
                                         const std::vector<double>& radii) {
  if (radii.size() < 2)
    throw config_error("far_field_remainder_probe: need >= 2 radii");
  const Grid3& g = density.grid;
  double support = 0.0;
  for (const Vec3& c : {g.lo, g.hi()}) support = std::max(support, norm(c));
  for (size_t i = 0; i < radii.size(); ++i) {
    if (i > 0 && radii[i] <= radii[i - 1])
      throw config_error("far_field_remainder_probe: radii must increase");
    if (radii[i] <= support)
      throw geometry_error("far_field_remainder_probe: radius inside support");
  }

  DirectionGrid one;
  one.dirs = {theta};
  one.weights = {4.0 * kPi};
  one.rule = "single";
  FarField ff = far_field_coefficient(E_k, density, one);
  const double k = kmag_of(E_k);

  RemainderProbe probe;
  probe.radii = radii;
  std::vector<Vec3> pts;
  for (double R : radii) pts.push_back(R * theta);
  std::vector<cplx> vals = apply_R0(E_k, density, pts);
  double scale = std::abs(ff.phi[0]);
  for (size_t i = 0; i < radii.size(); ++i) {
    cplx lead = ff.phi[0] * std::exp(kI * (k * radii[i])) / radii[i];
    probe.remainder.push_back(std::abs(vals[i] - lead));
  }
  probe.below_floor = true;
  for (size_t i = 0; i < radii.size(); ++i)
    if (probe.remainder[i] > 1e-12 * std::max(scale, 1e-300) / radii[i])
      probe.below_floor = false;
  probe.slope = probe.below_floor
                    ? 0.0
                    : loglog_slope(probe.radii, probe.remainder);
  return probe;
}

}  // namespace qscat
