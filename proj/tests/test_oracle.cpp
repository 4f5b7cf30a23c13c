#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qscat/catalog.hpp"
#include "qscat/oracle.hpp"

using namespace qscat;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("s-wave born phase has the gaussian closed form") {
  // delta_0^Born = -(2/k) int V sin^2(kr) dr
  //             = -(g w sqrt(pi))/(2k) (1 - e^{-k^2 w^2}) for a gaussian
  double g = 0.01, w = 1.0, k = 1.0;
  Potential V = make_potential("gaussian_well", {{"g", g}, {"width", w}});
  PhaseShiftSet ps = phase_shifts(V, k, 4);
  double want = -(g * w * std::sqrt(kPi)) / (2.0 * k) *
                (1.0 - std::exp(-k * k * w * w));
  CHECK(std::abs(ps.delta_born[0] - want) < 1e-6 * std::abs(want) + 1e-12);
}

TEST_CASE("weak coupling reduces to the born phases") {
  Potential V = make_potential(
      "yukawa_regularized", {{"g", 0.01}, {"mu", 4.0}, {"core", 0.08}});
  PhaseShiftSet ps = phase_shifts(V, 1.0);
  REQUIRE(ps.delta.size() == ps.delta_born.size());
  REQUIRE(ps.delta.size() >= 2);
  for (size_t l = 0; l < ps.delta.size(); ++l)
    CHECK(std::abs(ps.delta[l] - ps.delta_born[l]) < 1e-5);
  CHECK(ps.r_match > V.support_radius);
}

TEST_CASE("phase shifts shrink with l and flip with the coupling sign") {
  Potential well = make_potential("gaussian_well",
                                  {{"g", -1.0}, {"width", 1.0}});
  PhaseShiftSet ps = phase_shifts(well, 1.0, 6);
  REQUIRE(ps.l_max == 6);
  CHECK(std::abs(ps.delta[6]) < std::abs(ps.delta[0]));
  CHECK(ps.delta[0] > 0.0);  // attractive pulls the phase forward

  Potential hump = make_potential("gaussian_well",
                                  {{"g", 1.0}, {"width", 1.0}});
  PhaseShiftSet pr = phase_shifts(hump, 1.0, 6);
  CHECK(pr.delta[0] < 0.0);
}

TEST_CASE("optical identity of the partial-wave sum") {
  // Im f(0) = k sigma_tot / 4pi with sigma_tot = 4pi/k^2 sum (2l+1) sin^2
  Potential V = make_potential("gaussian_well", {{"g", -2.0}, {"width", 1.0}});
  double k = 1.3;
  PhaseShiftSet ps = phase_shifts(V, k);
  cplx f0 = partial_wave_amplitude(ps, 1.0);
  double sigma = 0.0;
  for (size_t l = 0; l < ps.delta.size(); ++l) {
    double s = std::sin(ps.delta[l]);
    sigma += (2.0 * l + 1.0) * s * s;
  }
  sigma *= 4.0 * kPi / (k * k);
  CHECK(f0.imag() == doctest::Approx(k * sigma / (4.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("forward amplitude dominates backward for a smooth well") {
  Potential V = make_potential("gaussian_well", {{"g", -2.0}, {"width", 1.5}});
  PhaseShiftSet ps = phase_shifts(V, 2.0);
  CHECK(std::abs(partial_wave_amplitude(ps, 1.0)) >
        std::abs(partial_wave_amplitude(ps, -1.0)));
}

TEST_CASE("bound state counting") {
  // gaussian well binds its first s-state near |g| w^2 ~ 1.34
  CHECK(bound_state_count(make_potential(
            "gaussian_well", {{"g", -1.0}, {"width", 1.0}})) == 0);
  CHECK(bound_state_count(make_potential(
            "gaussian_well", {{"g", -0.5}, {"width", 0.8}})) == 0);
  int c10 = bound_state_count(
      make_potential("gaussian_well", {{"g", -10.0}, {"width", 1.0}}));
  int c20 = bound_state_count(
      make_potential("gaussian_well", {{"g", -20.0}, {"width", 1.0}}));
  CHECK(c10 >= 1);
  CHECK(c20 > c10);
  CHECK(bound_state_count(make_potential(
            "soft_barrier", {{"g", 3.0}, {"width", 1.0}, {"rim", 0.2}})) == 0);
}
