#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qscat/catalog.hpp"
#include "qscat/directions.hpp"
#include "qscat/resolvent.hpp"
#include "qscat/validate.hpp"
#include "qscat/wave.hpp"

namespace qscat {

enum class SolveMethod { kAuto, kDenseLU, kGMRES, kBorn };

struct SolveOptions {
  SolveMethod method = SolveMethod::kAuto;
  double tol = 1e-8;
  int max_iter = 400;        // GMRES total iterations / Born sweeps
  int restart = 60;          // GMRES restart length
  std::int64_t lu_threshold = 4096;
  double born_radius_limit = 0.9;  // refuse Born above this spectral radius
};

enum class IncidentKind { kPlane, kSpherical };

// Solution of the Lippmann-Schwinger system on a grid.
struct LSSolution {
  ScalarField field;       // A (plane) or B_D (spherical), cell samples
  ScalarField incident;    // the incident wave on the same cells
  WaveContext wc;
  IncidentKind kind = IncidentKind::kPlane;
  std::string method;      // "lu" | "gmres" | "born"
  double residual = 0.0;   // ||(I + R0 V)u - inc||_2 / ||inc||_2
  int iterations = 0;
  double cond_estimate = 0.0;  // 0 = not estimated
  std::string warning;         // non-fatal conditioning note
};

// Plane-wave equation A = e^{ik.x} - R0(V A) on `grid` (must contain the
// potential support box).
LSSolution solve_plane(const Potential& V, const WaveContext& wc,
                       const Grid3& grid, const SolveOptions& opts = {});

// Spherical-source equation B = R0 rho_qD - R0(V B); the source ball at
// q_D = -nD must not intersect the grid box.
LSSolution solve_spherical(const Potential& V, const FormFactor& rho,
                           const WaveContext& wc, const Grid3& grid,
                           const SolveOptions& opts = {});

// Same equation with the source *inside* the box (the time-domain
// comparison target): rho_q is tabulated on the grid and the incident
// wave is R0 rho_q through the same Nystrom quadrature.  The shifted
// source support must fit in the box and stay clear of the potential.
LSSolution solve_driven(const Potential& V, const FormFactor& rho,
                        const WaveContext& wc, const Grid3& grid,
                        const SolveOptions& opts = {});

// b_D(n) = b(n) e^{i|k|D},  b(n) = (1/2pi) rho_hat(|k| n).
// |b| <= wiener_tol -> degenerate_source_error.
cplx normalization_bD(const FormFactor& rho, const WaveContext& wc,
                      double wiener_tol = 1e-10);

// B_D / b_D on the solution grid (throws unless kind == spherical).
ScalarField normalized_AD(const LSSolution& sol, const FormFactor& rho,
                          double wiener_tol = 1e-10);

// Scattering amplitudes a(k, theta) = -(1/2pi) int e^{-i|k|theta.y} V A dy
// for each direction; sigma column is |a|^2 by construction.
struct AmplitudeTable {
  DirectionGrid dirs;
  WaveContext wc;
  std::vector<cplx> a;
  std::vector<double> sigma;

  double total_cross_section() const;  // quadrature of sigma over dirs
};
AmplitudeTable amplitude(const Potential& V, const LSSolution& sol,
                         const DirectionGrid& dirs);
// Spherical solutions must be normalized by b_D first.
AmplitudeTable amplitude_normalized(const Potential& V, const LSSolution& sol,
                                    const FormFactor& rho,
                                    const DirectionGrid& dirs);

// T(|k|theta, k) = (2pi)^{-3} int e^{-i|k|theta.y} V(y) A(y) dy.
struct TMatrixValue {
  Vec3 theta;
  cplx T;
  cplx a;  // -4 pi^2 T, same quadrature
};
TMatrixValue t_matrix(const Potential& V, const LSSolution& sol,
                      const Vec3& theta);

// Spherical-vs-plane convergence sweep over emitter distances.
struct ConvergenceReport {
  std::vector<double> D;
  std::vector<double> err_incident;  // sup |inc_D/b_D - e^{ik.x}| on cells
  std::vector<double> err_field;     // ||A_D - A||_w / ||A||_w (sigma=2.6)
  std::vector<double> err_amp;       // max_j |a_D - a|
  double slope_incident = 0.0;
  double slope_field = 0.0;
  double slope_amp = 0.0;
  bool monotone_field = false;
  bool monotone_amp = false;
};
ConvergenceReport convergence_study(const Potential& V, const FormFactor& rho,
                                    const Vec3& k,
                                    const std::vector<double>& Ds,
                                    const Grid3& grid,
                                    const DirectionGrid& dirs,
                                    const SolveOptions& opts = {},
                                    double weight_sigma = 2.6);

// Least-squares slope of log(y) vs log(x) (shared by convergence and
// remainder probes).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qscat
