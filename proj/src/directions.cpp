#include "qscat/directions.hpp"

#include <cmath>
#include <numbers>

namespace qscat {

namespace {
constexpr double kPi = std::numbers::pi;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n <= 0) throw config_error("gauss_legendre: n must be > 0");
  x.assign(size_t(n), 0.0);
  w.assign(size_t(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess, Newton on P_n.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[size_t(i)] = -z;
    x[size_t(n - 1 - i)] = z;
    double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[size_t(i)] = wi;
    w[size_t(n - 1 - i)] = wi;
  }
}

DirectionGrid DirectionGrid::product(int n_theta, int n_phi) {
  if (n_theta <= 0 || n_phi <= 0)
    throw config_error("DirectionGrid::product: counts must be > 0");
  std::vector<double> ct, wt;
  gauss_legendre(n_theta, ct, wt);
  DirectionGrid g;
  g.rule = "product:" + std::to_string(n_theta) + "x" + std::to_string(n_phi);
  g.dirs.reserve(size_t(n_theta) * n_phi);
  g.weights.reserve(size_t(n_theta) * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    double c = ct[size_t(i)];
    double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < n_phi; ++j) {
      double phi = 2.0 * kPi * (j + 0.5) / n_phi;
      g.dirs.push_back({s * std::cos(phi), s * std::sin(phi), c});
      g.weights.push_back(wt[size_t(i)] * 2.0 * kPi / n_phi);
    }
  }
  return g;
}

DirectionGrid DirectionGrid::cube26() {
  DirectionGrid g;
  g.rule = "cube26";
  const double wv = 40.0 / 840.0 * 4.0 * kPi;  // face centers
  const double we = 32.0 / 840.0 * 4.0 * kPi;  // edge midpoints
  const double wc = 27.0 / 840.0 * 4.0 * kPi;  // corners
  for (int d = 0; d < 3; ++d)
    for (int s : {-1, 1}) {
      Vec3 v{0, 0, 0};
      v[size_t(d)] = s;
      g.dirs.push_back(v);
      g.weights.push_back(wv);
    }
  const double r2 = 1.0 / std::sqrt(2.0);
  for (int d = 0; d < 3; ++d)  // zero component d
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1}) {
        Vec3 v{0, 0, 0};
        v[size_t((d + 1) % 3)] = s1 * r2;
        v[size_t((d + 2) % 3)] = s2 * r2;
        g.dirs.push_back(v);
        g.weights.push_back(we);
      }
  const double r3 = 1.0 / std::sqrt(3.0);
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1})
      for (int s3 : {-1, 1}) {
        g.dirs.push_back({s1 * r3, s2 * r3, s3 * r3});
        g.weights.push_back(wc);
      }
  return g;
}

DirectionGrid DirectionGrid::fibonacci(int n) {
  if (n <= 0) throw config_error("DirectionGrid::fibonacci: n must be > 0");
  DirectionGrid g;
  g.rule = "fibonacci:" + std::to_string(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * i;
    g.dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
    g.weights.push_back(4.0 * kPi / n);
  }
  return g;
}

DirectionGrid DirectionGrid::parse(const std::string& scheme) {
  if (scheme == "cube26") return cube26();
  auto colon = scheme.find(':');
  if (colon != std::string::npos) {
    std::string head = scheme.substr(0, colon);
    std::string tail = scheme.substr(colon + 1);
    try {
      if (head == "fibonacci") return fibonacci(std::stoi(tail));
      if (head == "product") {
        auto x = tail.find('x');
        if (x == std::string::npos) throw config_error("missing 'x'");
        return product(std::stoi(tail.substr(0, x)),
                       std::stoi(tail.substr(x + 1)));
      }
    } catch (const config_error&) {
      throw;
    } catch (const std::exception&) {
      throw config_error("DirectionGrid: cannot parse '" + scheme + "'");
    }
  }
  throw config_error("DirectionGrid: unknown scheme '" + scheme + "'");
}

}  // namespace qscat
