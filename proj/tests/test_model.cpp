#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qscat/catalog.hpp"
#include "qscat/directions.hpp"
#include "qscat/errors.hpp"
#include "qscat/grid.hpp"
#include "qscat/validate.hpp"
#include "qscat/wave.hpp"

using namespace qscat;

namespace {
constexpr double kPi = std::numbers::pi;

// exact sphere average of x^(2i) y^(2j) z^(2k):
// 4pi (2i-1)!!(2j-1)!!(2k-1)!! / (2i+2j+2k+1)!!
double dfact(int n) { return n <= 1 ? 1.0 : n * dfact(n - 2); }
double monomial_integral(int i, int j, int k) {
  return 4.0 * kPi * dfact(2 * i - 1) * dfact(2 * j - 1) * dfact(2 * k - 1) /
         dfact(2 * (i + j + k) + 1);
}

double quad_monomial(const DirectionGrid& d, int px, int py, int pz) {
  double s = 0.0;
  for (size_t q = 0; q < d.size(); ++q)
    s += d.weights[q] * std::pow(d.dirs[q][0], px) *
         std::pow(d.dirs[q][1], py) * std::pow(d.dirs[q][2], pz);
  return s;
}
}  // namespace

TEST_CASE("grid indexing and geometry") {
  Grid3 g = Grid3::cube(8, 2.0);
  CHECK(g.h == doctest::Approx(0.5));
  CHECK(g.size() == 512);
  // z-fastest layout round trip
  for (std::int64_t i : {0l, 17l, 511l}) {
    Vec3 c = g.center(i);
    int iz = int(i % 8), iy = int((i / 8) % 8), ix = int(i / 64);
    CHECK(g.index(ix, iy, iz) == i);
    CHECK(norm(c - g.center(ix, iy, iz)) == doctest::Approx(0.0));
  }
  // cell centers straddle the origin symmetrically
  CHECK(g.center(0, 0, 0)[0] == doctest::Approx(-1.75));
  CHECK(g.center(7, 7, 7)[2] == doctest::Approx(1.75));
  CHECK(g.contains_box({-1.9, 0, 0}, {1.9, 0.1, 0.1}));
  CHECK(!g.contains_box({-1.9, 0, 0}, {2.5, 0.1, 0.1}));
  CHECK_THROWS_AS(Grid3::cube(0, 1.0), config_error);
  CHECK_THROWS_AS(Grid3::cube(8, -1.0), config_error);
}

TEST_CASE("scalar field quadrature") {
  Grid3 g = Grid3::cube(32, 3.0);
  ScalarField f = ScalarField::tabulate(g, [](const Vec3& x) {
    return cplx(std::exp(-dot(x, x)), 0.0);
  });
  // integral of exp(-r^2) over R^3 = pi^{3/2}; truncated tail ~3.7e-4
  CHECK(std::abs(f.integrate().real() - std::pow(kPi, 1.5)) < 5e-4);
  CHECK(f.sup_norm() == doctest::Approx(std::exp(-dot(g.center(16, 16, 16), g.center(16, 16, 16)))));
}

TEST_CASE("wave context") {
  WaveContext wc{{0.0, 0.0, 2.0}, 100.0};
  CHECK(wc.kmag() == doctest::Approx(2.0));
  CHECK(wc.energy() == doctest::Approx(2.0));
  CHECK(wc.unit()[2] == doctest::Approx(1.0));
  CHECK(wc.q_D()[2] == doctest::Approx(-100.0));
  CHECK_THROWS_AS(WaveContext({0.0, 0.0, 0.0}, 1.0), config_error);
  CHECK_THROWS_AS(WaveContext({0.0, 0.0, 1.0}, -1.0), config_error);
}

TEST_CASE("gauss-legendre exactness") {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  REQUIRE(x.size() == 5);
  double s8 = 0.0, s9 = 0.0, sw = 0.0;
  for (size_t i = 0; i < 5; ++i) {
    sw += w[i];
    s8 += w[i] * std::pow(x[i], 8);
    s9 += w[i] * std::pow(x[i], 9);
  }
  CHECK(sw == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s8 == doctest::Approx(2.0 / 9.0).epsilon(1e-13));  // degree 9 rule
  CHECK(std::abs(s9) < 1e-15);                             // odd
}

TEST_CASE("cube26 is a degree-7 rule") {
  DirectionGrid d = DirectionGrid::cube26();
  REQUIRE(d.size() == 26);
  CHECK(d.weight_sum() == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  // all even monomials through degree 6 and odd ones through 7
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; i + j <= 3; ++j)
      for (int k = 0; i + j + k <= 3; ++k)
        CHECK(quad_monomial(d, 2 * i, 2 * j, 2 * k) ==
              doctest::Approx(monomial_integral(i, j, k)).epsilon(1e-12));
  CHECK(std::abs(quad_monomial(d, 7, 0, 0)) < 1e-14);
  CHECK(std::abs(quad_monomial(d, 5, 2, 0)) < 1e-14);
  CHECK(std::abs(quad_monomial(d, 3, 3, 1)) < 1e-14);
}

TEST_CASE("product rule exactness and parse") {
  DirectionGrid d = DirectionGrid::product(8, 16);
  REQUIRE(d.size() == 8 * 16);
  CHECK(d.weight_sum() == doctest::Approx(4.0 * kPi).epsilon(1e-13));
  CHECK(quad_monomial(d, 4, 2, 0) ==
        doctest::Approx(monomial_integral(2, 1, 0)).epsilon(1e-12));
  CHECK(quad_monomial(d, 0, 2, 6) ==
        doctest::Approx(monomial_integral(0, 1, 3)).epsilon(1e-12));

  DirectionGrid p = DirectionGrid::parse("product:8x16");
  CHECK(p.size() == d.size());
  CHECK(DirectionGrid::parse("cube26").size() == 26);
  CHECK(DirectionGrid::parse("fibonacci:50").size() == 50);
  CHECK(DirectionGrid::parse("fibonacci:50").weight_sum() ==
        doctest::Approx(4.0 * kPi));
  CHECK_THROWS_AS(DirectionGrid::parse("lebedev:17"), config_error);
  CHECK_THROWS_AS(DirectionGrid::parse("product:0x4"), config_error);
}

TEST_CASE("direction vectors are unit") {
  for (const char* scheme : {"product:6x12", "cube26", "fibonacci:37"}) {
    DirectionGrid d = DirectionGrid::parse(scheme);
    for (const Vec3& v : d.dirs) CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("catalog values and metadata") {
  Potential zero = make_potential("zero", {});
  CHECK(zero.is_zero());
  CHECK(zero({1.0, 2.0, 3.0}) == 0.0);

  Potential gw = make_potential("gaussian_well", {{"g", -1.0}, {"width", 1.0}});
  CHECK(gw({0, 0, 0}) == doctest::Approx(-1.0));
  CHECK(gw({1, 0, 0}) == doctest::Approx(-std::exp(-1.0)));
  // support radius: |V| = tol * max|V| at r = w sqrt(ln(1/tol))
  CHECK(gw.support_radius ==
        doctest::Approx(std::sqrt(std::log(1e12))).epsilon(1e-3));
  CHECK(gw.envelope_C > 0.0);

  Potential yk = make_potential(
      "yukawa_regularized", {{"g", 0.01}, {"mu", 4.0}, {"core", 0.08}});
  double s0 = 0.08;
  CHECK(yk({0, 0, 0}) == doctest::Approx(0.01 * std::exp(-4.0 * s0) / s0));

  Potential sb = make_potential(
      "soft_barrier", {{"g", 1.0}, {"width", 1.0}, {"rim", 0.2}});
  CHECK(sb({0, 0, 0}) == doctest::Approx(1.0 / (1.0 + std::exp(-5.0))));
  CHECK(sb({1, 0, 0}) == doctest::Approx(0.5));

  FormFactor src = make_form_factor(
      "gaussian_source", {{"amplitude", 2.0}, {"width", 0.5}, {"phase", 0.5}});
  cplx v = src.eval({0, 0, 0});
  CHECK(std::abs(v) == doctest::Approx(2.0));
  CHECK(std::arg(v) == doctest::Approx(0.5));

  CHECK(catalog().size() >= 5);
}

TEST_CASE("catalog rejects bad input") {
  CHECK_THROWS_AS(make_potential("square_well", {}), config_error);
  CHECK_THROWS_AS(make_potential("gaussian_well", {{"g", -1.0}, {"depth", 2.0}}),
                  config_error);
  CHECK_THROWS_AS(make_potential("gaussian_well", {{"width", -1.0}}),
                  config_error);
  CHECK_THROWS_AS(make_potential("yukawa_regularized", {{"core", 0.0}}),
                  config_error);
  CHECK_THROWS_AS(make_form_factor("gaussian_source", {{"amplitude", 0.0}}),
                  config_error);
  CHECK_THROWS_AS(make_form_factor("point", {}), config_error);
}

TEST_CASE("decay validators accept the catalog") {
  Potential gw = make_potential("gaussian_well", {{"g", -1.0}, {"width", 1.0}});
  ValidationReport rep = validate_potential(gw, 2048);
  CHECK(rep.passed);
  for (const auto& c : rep.checks) CHECK(c.passed);

  FormFactor src = make_form_factor("gaussian_source",
                                    {{"amplitude", 1.0}, {"width", 0.5}});
  ValidationReport rf = validate_form_factor(src, 2048);
  CHECK(rf.passed);
}

TEST_CASE("fourier transform of a gaussian source") {
  // rho = A exp(-r^2/w^2) -> rho_hat(xi) = A (w sqrt(pi))^3 exp(-w^2 xi^2/4)
  FormFactor src = make_form_factor("gaussian_source",
                                    {{"amplitude", 1.5}, {"width", 0.5}});
  double w = 0.5, A = 1.5;
  for (double ximag : {0.0, 1.0, 2.5}) {
    cplx got = fourier_transform(src, {0.0, 0.0, ximag});
    double want =
        A * std::pow(w * std::sqrt(kPi), 3) * std::exp(-w * w * ximag * ximag / 4.0);
    CHECK(std::abs(got - want) < 1e-8 * std::abs(want) + 1e-14);
  }
}

TEST_CASE("wiener check over a direction set") {
  FormFactor src = make_form_factor("gaussian_source",
                                    {{"amplitude", 1.0}, {"width", 0.5}});
  WienerResult wr = wiener_check(src, 1.0, DirectionGrid::cube26());
  CHECK(wr.passed);
  CHECK(wr.min_abs > 0.1);  // gaussian transform is strictly positive
  // radial profile: every direction sees the same magnitude
  for (const cplx& v : wr.rho_hat)
    CHECK(std::abs(v) == doctest::Approx(wr.min_abs).epsilon(1e-9));
}
