#pragma once

#include <vector>

#include "qscat/directions.hpp"
#include "qscat/grid.hpp"
#include "qscat/stationary.hpp"

namespace qscat {

// Probability current j = Im(conj(psi) grad psi) by central differences
// (one-sided at faces).
struct FluxField {
  Grid3 grid;
  std::vector<std::array<double, 3>> j;
};
FluxField flux_field(const ScalarField& psi);

// Radial scattered-wave current at R*theta: the scattered field
// -R0(V A) is reconstructed off-grid from the solved density, so any R
// outside the potential support is admissible.  `field` must be the
// plane-normalized solution (A, or A_D/b_D); the return is
// R^2 j_r / |k| per direction, which tends to sigma(theta) as R grows.
struct AngularDensity {
  DirectionGrid dirs;
  double R = 0.0;
  std::vector<double> sigma_flux;  // R^2 j_r / |k| per direction
};
AngularDensity angular_scattered_density(const Potential& V,
                                         const ScalarField& field,
                                         const WaveContext& wc, double R,
                                         const DirectionGrid& dirs);

// Differential cross section from an amplitude table (|a|^2) and the
// total via the direction quadrature.
double cross_section_total(const AmplitudeTable& amp);

// Triangulated surface with per-node areas rescaled so the total matches
// the analytic area (sphere 4 pi R^2, disk pi r^2).
struct SurfacePatch {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<double> areas;

  static SurfacePatch sphere(double R, int refine = 3);
  // Disk centered at c with unit normal nrm and radius r.
  static SurfacePatch disk(const Vec3& c, const Vec3& nrm, double r,
                           int rings = 24);
  double total_area() const;
};

// Net current through the patch: integral j . n dS, with j sampled by
// trilinear interpolation of a FluxField (points must be interior).
double surface_flux(const FluxField& f, const SurfacePatch& patch);

}  // namespace qscat
