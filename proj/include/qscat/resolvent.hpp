#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "qscat/catalog.hpp"
#include "qscat/directions.hpp"
#include "qscat/grid.hpp"
#include "qscat/wave.hpp"

namespace qscat {

// Outgoing free-resolvent kernel e^{i|k||x-y|}/(2 pi |x-y|) at energy
// E_k = |k|^2/2.  Coincident points are singular.
cplx resolvent_kernel(double E_k, const Vec3& x, const Vec3& y);

// Quadrature value replacing h^3 * kernel on the self cell: the exact
// kernel integral over the ball of volume h^3 (radius a = (3h^3/4pi)^{1/3}),
//   (2/k^2) (e^{ika}(1 - ika) - 1)  ->  a^2  as k -> 0,
// evaluated by series for small ka.
cplx diagonal_correction(double E_k, double h);

// Dense Nystrom matrix: targets x source cells, entries h^3 K(t, y_j)
// with the diagonal correction whenever |t - y_j| < h/2.
struct KernelMatrix {
  Grid3 source;
  std::vector<Vec3> targets;
  double E_k = 0.0;
  std::vector<cplx> entries;  // row-major targets x cells

  static KernelMatrix assemble(double E_k, const Grid3& source,
                               const std::vector<Vec3>& targets);
  std::vector<cplx> apply(const std::vector<cplx>& density) const;

  void save(const std::string& path) const;
  static KernelMatrix load(const std::string& path);
};

// (R0 density)(t) = sum_j h^3 K(t, y_j) density_j with the self-cell
// correction; direct summation (reference path, any target set).
std::vector<cplx> apply_R0(double E_k, const ScalarField& density,
                           const std::vector<Vec3>& targets);

// Same sum together with its exact gradient, grad K = K (ik - 1/r) r_hat;
// targets must lie strictly outside the source cells.
struct FieldAndGrad {
  std::vector<cplx> value;
  std::vector<std::array<cplx, 3>> grad;
};
FieldAndGrad apply_R0_grad(double E_k, const ScalarField& density,
                           const std::vector<Vec3>& targets);

// Grid-to-itself apply via zero-padded FFT of the tabulated translation-
// invariant kernel; bit-for-bit deterministic (FFTW_ESTIMATE, fixed
// ordering) and equal to the dense matvec up to rounding.
class GridConvolver {
 public:
  GridConvolver(double E_k, const Grid3& grid);
  ~GridConvolver();
  GridConvolver(const GridConvolver&) = delete;
  GridConvolver& operator=(const GridConvolver&) = delete;

  const Grid3& grid() const { return grid_; }
  double energy() const { return E_k_; }
  // out = R0 applied to cell values (out has grid.size() entries).
  void apply(const std::vector<cplx>& density, std::vector<cplx>& out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Grid3 grid_;
  double E_k_;
};

// Incident spherical wave |q_D| * (R0 rho_qD)(x) at the given targets,
// rho_q(x) = |q| rho(x - q) ... the |q| factor is applied here so the
// result is D * R0[rho(.-q_D)].  The source quadrature grid is refined
// until the targets stabilize to rtol.  Targets inside the shifted
// source support -> geometry_error.
std::vector<cplx> incident_spherical(const FormFactor& rho,
                                     const WaveContext& wc,
                                     const std::vector<Vec3>& targets,
                                     double rtol = 1e-8);

// Far-field coefficient of R0 density: phi(theta) =
// (1/2pi) integral e^{-i|k| theta.y} density(y) dy (grid quadrature).
struct FarField {
  DirectionGrid dirs;
  double E_k = 0.0;
  std::vector<cplx> phi;
};
FarField far_field_coefficient(double E_k, const ScalarField& density,
                               const DirectionGrid& dirs);

// Probe |R0 density(R theta) - phi(theta) e^{i|k|R}/R| on increasing
// radii outside the support and fit the log-log decay slope (expect
// <= -2 for smooth compact sources).
struct RemainderProbe {
  std::vector<double> radii;
  std::vector<double> remainder;
  double slope = 0.0;
  bool below_floor = false;  // remainders at rounding level; slope moot
};
RemainderProbe far_field_remainder_probe(double E_k,
                                         const ScalarField& density,
                                         const Vec3& theta,
                                         const std::vector<double>& radii);

}  // namespace qscat
