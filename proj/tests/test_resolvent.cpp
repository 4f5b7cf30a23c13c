#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "qscat/catalog.hpp"
#include "qscat/errors.hpp"
#include "qscat/resolvent.hpp"

using namespace qscat;

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};
}  // namespace

TEST_CASE("free kernel value and singularity") {
  double E_k = 2.0;  // k = 2
  Vec3 x{1.0, 0.0, 0.0}, y{0.0, 0.0, 0.0};
  cplx want = std::exp(kI * 2.0) / (2.0 * kPi);
  CHECK(std::abs(resolvent_kernel(E_k, x, y) - want) < 1e-15);
  CHECK_THROWS_AS(resolvent_kernel(E_k, x, x), singular_point_error);
}

TEST_CASE("self-cell correction matches the closed form and its limit") {
  double h = 0.1;
  double a = std::cbrt(3.0 * h * h * h / (4.0 * kPi));
  // closed-form branch (ka not small): straight evaluation is accurate
  for (double k : {3.0, 40.0}) {
    cplx closed =
        (2.0 / (k * k)) * (std::exp(kI * (k * a)) * cplx(1.0, -k * a) - 1.0);
    cplx got = diagonal_correction(k * k / 2.0, h);
    CHECK(std::abs(got - closed) < 1e-13 * std::abs(closed));
  }
  // no jump across the ka = 1e-3 branch switch: over a +/-1e-6 relative
  // interval the value itself only moves by ~(2/3) a^2 dk a ~ 1.3e-9 |lo|
  double k_lo = 1e-3 * (1.0 - 1e-6) / a, k_hi = 1e-3 * (1.0 + 1e-6) / a;
  cplx lo = diagonal_correction(k_lo * k_lo / 2.0, h);
  cplx hi = diagonal_correction(k_hi * k_hi / 2.0, h);
  CHECK(std::abs(hi - lo) < 5e-9 * std::abs(lo));
  // k -> 0 limit is a^2
  CHECK(std::abs(diagonal_correction(1e-24, h) - cplx(a * a, 0.0)) <
        1e-12 * a * a);
}

TEST_CASE("fft convolver equals the dense matvec") {
  Grid3 g = Grid3::cube(12, 1.5);
  double E_k = 0.5 * 1.3 * 1.3;
  ScalarField dens = ScalarField::tabulate(g, [](const Vec3& x) {
    return std::exp(-3.0 * dot(x, x)) * std::exp(cplx(0.0, x[0]));
  });

  KernelMatrix km = KernelMatrix::assemble(E_k, g, g.centers());
  std::vector<cplx> dense = km.apply(dens.values);

  GridConvolver conv(E_k, g);
  std::vector<cplx> fast;
  conv.apply(dens.values, fast);

  double scale = 0.0, diff = 0.0;
  for (size_t i = 0; i < dense.size(); ++i) {
    scale = std::max(scale, std::abs(dense[i]));
    diff = std::max(diff, std::abs(dense[i] - fast[i]));
  }
  CHECK(diff < 1e-12 * scale);

  // and both agree with the direct reference sum
  std::vector<cplx> direct = apply_R0(E_k, dens, g.centers());
  double diff2 = 0.0;
  for (size_t i = 0; i < direct.size(); ++i)
    diff2 = std::max(diff2, std::abs(direct[i] - dense[i]));
  CHECK(diff2 < 1e-12 * scale);
}

TEST_CASE("exact gradient agrees with finite differences off-support") {
  Grid3 g = Grid3::cube(16, 1.0);
  double E_k = 0.5;  // k = 1
  ScalarField dens = ScalarField::tabulate(
      g, [](const Vec3& x) { return std::exp(-4.0 * dot(x, x)); });

  std::vector<Vec3> pts{{2.0, 0.5, -0.3}, {0.0, -3.0, 1.0}};
  FieldAndGrad fg = apply_R0_grad(E_k, dens, pts);
  REQUIRE(fg.value.size() == pts.size());

  double fd = 1e-5;
  for (size_t p = 0; p < pts.size(); ++p) {
    for (int d = 0; d < 3; ++d) {
      Vec3 hi = pts[p], lo = pts[p];
      hi[d] += fd;
      lo[d] -= fd;
      cplx num =
          (apply_R0(E_k, dens, {hi})[0] - apply_R0(E_k, dens, {lo})[0]) /
          (2.0 * fd);
      CHECK(std::abs(num - fg.grad[p][d]) < 1e-8);
    }
    CHECK(std::abs(fg.value[p] - apply_R0(E_k, dens, {pts[p]})[0]) < 1e-15);
  }

  // a target sitting on a cell center is inside that source cell
  CHECK_THROWS_AS(apply_R0_grad(E_k, dens, {g.center(8, 8, 8)}),
                  geometry_error);
}

TEST_CASE("far-field coefficient of a tight source") {
  // nearly-point source at the origin: R0 rho ~ rho_total e^{ikR}/(2 pi R),
  // so phi(theta) ~ rho_total / (2 pi) for every theta.
  Grid3 g = Grid3::cube(24, 0.4);
  double E_k = 0.5;
  ScalarField dens = ScalarField::tabulate(
      g, [](const Vec3& x) { return std::exp(-dot(x, x) / 0.01); });
  cplx total = dens.integrate();

  DirectionGrid dirs = DirectionGrid::cube26();
  FarField ff = far_field_coefficient(E_k, dens, dirs);
  REQUIRE(ff.phi.size() == dirs.size());
  for (const cplx& v : ff.phi)
    CHECK(std::abs(v - total / (2.0 * kPi)) < 2e-3 * std::abs(total));
}

TEST_CASE("far-field remainder decays at least like 1/R^2") {
  Grid3 g = Grid3::cube(16, 1.0);
  double E_k = 0.5 * 1.21;
  ScalarField dens = ScalarField::tabulate(
      g, [](const Vec3& x) { return std::exp(-5.0 * dot(x, x)); });
  RemainderProbe pr = far_field_remainder_probe(
      E_k, dens, {0.0, 0.0, 1.0}, {20.0, 40.0, 80.0, 160.0, 320.0});
  REQUIRE(pr.remainder.size() == 5);
  if (!pr.below_floor) {
    CHECK(pr.slope < -1.7);
    CHECK(pr.slope > -2.6);
  }
  for (size_t i = 1; i < pr.remainder.size(); ++i)
    CHECK(pr.remainder[i] < pr.remainder[i - 1]);
}

TEST_CASE("incident spherical wave carries the emitter phase") {
  // far emitter, evaluation near the origin: D * R0[rho(.-q)] should be
  // close to rho_hat(k n)/(2 pi) e^{ikD} e^{ik.x} (the plane-wave limit).
  FormFactor rho = make_form_factor("gaussian_source",
                                    {{"amplitude", 1.0}, {"width", 0.4}});
  double D = 600.0;
  WaveContext wc{{0.0, 0.0, 1.0}, D};

  std::vector<Vec3> targets{{0.0, 0.0, 0.0}, {0.2, -0.1, 0.4}};
  std::vector<cplx> got = incident_spherical(rho, wc, targets, 1e-8);

  double w = 0.4;
  cplx rho_hat = std::pow(w * std::sqrt(kPi), 3);  // at |xi| = 1
  rho_hat *= std::exp(-w * w / 4.0);
  for (size_t i = 0; i < targets.size(); ++i) {
    cplx plane = rho_hat / (2.0 * kPi) *
                 std::exp(kI * (D + targets[i][2]));
    // relative deviation is O(1/D) ~ 2e-3
    CHECK(std::abs(got[i] - plane) < 0.01 * std::abs(plane));
  }

  // target inside the shifted support is rejected
  CHECK_THROWS_AS(
      incident_spherical(rho, wc, {Vec3{0.0, 0.0, -D}}, 1e-8),
      geometry_error);
}

TEST_CASE("kernel matrix file round trip") {
  Grid3 g = Grid3::cube(4, 0.5);
  std::vector<Vec3> targets{{0.9, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  KernelMatrix km = KernelMatrix::assemble(1.0, g, targets);
  std::string path = "km_roundtrip.bin";
  km.save(path);
  KernelMatrix back = KernelMatrix::load(path);
  std::remove(path.c_str());

  CHECK(back.E_k == km.E_k);
  CHECK(back.source.n == km.source.n);
  CHECK(back.targets.size() == km.targets.size());
  REQUIRE(back.entries.size() == km.entries.size());
  for (size_t i = 0; i < km.entries.size(); ++i)
    CHECK(back.entries[i] == km.entries[i]);
}
