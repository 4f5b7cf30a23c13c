#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qscat/catalog.hpp"
#include "qscat/errors.hpp"
#include "qscat/stationary.hpp"
#include "qscat/validate.hpp"

using namespace qscat;

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_CASE("zero potential leaves the incident wave untouched") {
  Potential V = make_potential("zero", {});
  WaveContext wc{{0.0, 0.0, 1.0}, 100.0};
  Grid3 g = Grid3::cube(10, 1.0);
  LSSolution sol = solve_plane(V, wc, g);
  CHECK(sol.residual <= 1e-13);
  CHECK(max_abs_diff(sol.field.values, sol.incident.values) <= 1e-13);
  AmplitudeTable amp = amplitude(V, sol, DirectionGrid::cube26());
  for (const cplx& a : amp.a) CHECK(std::abs(a) <= 1e-14);
  CHECK(amp.total_cross_section() <= 1e-14);
}

TEST_CASE("dense LU and GMRES agree") {
  Potential V = make_potential("gaussian_well", {{"g", -1.5}, {"width", 1.0}});
  WaveContext wc{{0.0, 0.0, 1.0}, 100.0};
  Grid3 g = Grid3::cube(10, 5.6);  // 1000 unknowns: dense path allowed

  SolveOptions lu;
  lu.method = SolveMethod::kDenseLU;
  LSSolution s_lu = solve_plane(V, wc, g, lu);
  CHECK(s_lu.method == "lu");
  CHECK(s_lu.residual <= 1e-12);

  SolveOptions gm;
  gm.method = SolveMethod::kGMRES;
  gm.tol = 1e-12;
  LSSolution s_gm = solve_plane(V, wc, g, gm);
  CHECK(s_gm.method == "gmres");
  CHECK(s_gm.iterations > 0);

  CHECK(max_abs_diff(s_lu.field.values, s_gm.field.values) < 1e-9);
}

TEST_CASE("born iteration matches GMRES at weak coupling") {
  Potential V = make_potential(
      "yukawa_regularized", {{"g", 0.01}, {"mu", 4.0}, {"core", 0.08}});
  WaveContext wc{{0.0, 0.0, 1.0}, 100.0};
  Grid3 g = Grid3::cube(12, 6.0);

  SolveOptions bo;
  bo.method = SolveMethod::kBorn;
  bo.tol = 1e-12;
  LSSolution s_b = solve_plane(V, wc, g, bo);
  CHECK(s_b.method == "born");

  SolveOptions gm;
  gm.method = SolveMethod::kGMRES;
  gm.tol = 1e-12;
  LSSolution s_g = solve_plane(V, wc, g, gm);

  CHECK(max_abs_diff(s_b.field.values, s_g.field.values) < 1e-10);
}

TEST_CASE("born refuses strong coupling") {
  Potential V = make_potential("gaussian_well", {{"g", -30.0}, {"width", 1.5}});
  WaveContext wc{{0.0, 0.0, 0.3}, 100.0};
  Grid3 g = Grid3::cube(12, 8.0);
  SolveOptions bo;
  bo.method = SolveMethod::kBorn;
  CHECK_THROWS_AS(solve_plane(V, wc, g, bo), numeric_error);
}

TEST_CASE("grid must cover the potential support") {
  Potential V = make_potential("gaussian_well", {{"g", -1.0}, {"width", 2.0}});
  WaveContext wc{{0.0, 0.0, 1.0}, 100.0};
  CHECK_THROWS_AS(solve_plane(V, wc, Grid3::cube(8, 1.0)), geometry_error);
}

TEST_CASE("amplitude and t-matrix stay on the stated normalization") {
  Potential V = make_potential("gaussian_well", {{"g", -1.0}, {"width", 1.0}});
  WaveContext wc{{0.0, 0.0, 1.0}, 100.0};
  Grid3 g = Grid3::cube(16, 5.5);
  SolveOptions gm;
  gm.method = SolveMethod::kGMRES;
  gm.tol = 1e-10;
  LSSolution sol = solve_plane(V, wc, g, gm);

  DirectionGrid dirs = DirectionGrid::cube26();
  AmplitudeTable amp = amplitude(V, sol, dirs);
  double a_scale = 0.0;
  for (const cplx& a : amp.a) a_scale = std::max(a_scale, std::abs(a));
  for (size_t j = 0; j < dirs.size(); ++j) {
    CHECK(amp.sigma[j] == doctest::Approx(std::norm(amp.a[j])).epsilon(1e-14));
    TMatrixValue tm = t_matrix(V, sol, dirs.dirs[j]);
    // a = -4 pi^2 T on the same quadrature
    CHECK(std::abs(tm.a + 4.0 * kPi * kPi * tm.T) <= 1e-13 * std::abs(tm.a));
    CHECK(std::abs(tm.a - amp.a[j]) <= 1e-12 * a_scale);
  }
  CHECK(amp.total_cross_section() > 0.0);
}

TEST_CASE("spherical-only and plane-only guards") {
  Potential V = make_potential("gaussian_well", {{"g", -1.0}, {"width", 1.0}});
  FormFactor rho = make_form_factor("gaussian_source",
                                    {{"amplitude", 1.0}, {"width", 0.5}});
  WaveContext wc{{0.0, 0.0, 1.0}, 50.0};
  Grid3 g = Grid3::cube(8, 5.5);

  LSSolution sph = solve_spherical(V, rho, wc, g);
  CHECK(sph.kind == IncidentKind::kSpherical);
  CHECK_THROWS_AS(amplitude(V, sph, DirectionGrid::cube26()), config_error);
  CHECK_THROWS_AS(t_matrix(V, sph, Vec3{0, 0, 1}), config_error);

  LSSolution pl = solve_plane(V, wc, g);
  CHECK_THROWS_AS(normalized_AD(pl, rho), config_error);

  CHECK_THROWS_AS(
      solve_spherical(V, rho, WaveContext({0, 0, 1}, 0.0), g),
      config_error);
  // emitter ball overlapping the grid box
  CHECK_THROWS_AS(solve_spherical(V, rho, WaveContext({0, 0, 1}, 1.0), g),
                  geometry_error);
}

TEST_CASE("spherical normalization has the closed form") {
  FormFactor rho = make_form_factor("gaussian_source",
                                    {{"amplitude", 2.0}, {"width", 0.5}});
  WaveContext wc{{0.0, 0.0, 1.5}, 40.0};
  cplx b = normalization_bD(rho, wc);
  double w = 0.5, k = 1.5;
  cplx want = 2.0 * std::pow(w * std::sqrt(kPi), 3) *
              std::exp(-w * w * k * k / 4.0) / (2.0 * kPi) *
              std::exp(kI * k * 40.0);
  CHECK(std::abs(b - want) <= 1e-8 * std::abs(want));
  CHECK_THROWS_AS(normalization_bD(rho, wc, /*wiener_tol=*/1e3),
                  degenerate_source_error);
}

TEST_CASE("driven solve with zero potential returns the incident field") {
  Potential V = make_potential("zero", {});
  FormFactor rho = make_form_factor("gaussian_source",
                                    {{"amplitude", 1.0}, {"width", 0.4}});
  WaveContext wc{{0.0, 0.0, 1.0}, 2.0};
  Grid3 g = Grid3::cube(16, 6.0);
  LSSolution sol = solve_driven(V, rho, wc, g);
  CHECK(sol.residual <= 1e-13);
  CHECK(max_abs_diff(sol.field.values, sol.incident.values) <= 1e-13);
  // source must fit inside the box
  CHECK_THROWS_AS(solve_driven(V, rho, WaveContext({0, 0, 1}, 5.5), g),
                  geometry_error);
}

TEST_CASE("normalized spherical field approaches the plane solution") {
  Potential V = make_potential("gaussian_well", {{"g", -1.0}, {"width", 1.0}});
  FormFactor rho = make_form_factor("gaussian_source",
                                    {{"amplitude", 1.0}, {"width", 0.5}});
  Vec3 khat{0.0, 0.0, 1.0};
  Grid3 g = Grid3::cube(10, 5.5);
  SolveOptions gm;
  gm.method = SolveMethod::kGMRES;
  gm.tol = 1e-10;

  LSSolution pl = solve_plane(V, WaveContext(khat), g, gm);
  double scale = pl.field.sup_norm();

  double prev = 1e300;
  for (double D : {50.0, 200.0}) {
    LSSolution sph = solve_spherical(V, rho, WaveContext(khat, D), g, gm);
    ScalarField ad = normalized_AD(sph, rho);
    double dev = 0.0;
    for (size_t i = 0; i < ad.values.size(); ++i)
      dev = std::max(dev, std::abs(ad.values[i] - pl.field.values[i]));
    CHECK(dev < prev);
    // leading error is the wavefront curvature k |x_perp|^2 / 2D over the
    // box, so O(1/D) with a box-sized constant
    CHECK(dev < 60.0 / D * scale);
    prev = dev;
  }
}

TEST_CASE("loglog slope helper") {
  std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  std::vector<double> y{1.0, 0.25, 0.0625, 0.015625};
  CHECK(loglog_slope(x, y) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), config_error);
}
