#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "qscat/errors.hpp"

namespace qscat {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm_inf(const Vec3& a) {
  return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

// Uniform cell-centered grid over the box [lo, lo + n*h] per axis.
// Cell centers: lo_i + (j + 1/2) h, j = 0..n_i-1.  Index order is
// row-major with z fastest: idx = (ix*ny + iy)*nz + iz.
struct Grid3 {
  std::array<int, 3> n{0, 0, 0};
  double h = 0.0;
  Vec3 lo{0.0, 0.0, 0.0};

  Grid3() = default;
  Grid3(std::array<int, 3> n_, double h_, Vec3 lo_) : n(n_), h(h_), lo(lo_) {
    if (n[0] <= 0 || n[1] <= 0 || n[2] <= 0 || h <= 0.0)
      throw config_error("Grid3: dims and spacing must be positive");
  }

  // Cube [-half, half]^3 with n cells per axis.
  static Grid3 cube(int nn, double half) {
    if (nn <= 0 || half <= 0.0) throw config_error("Grid3::cube: bad args");
    double hh = 2.0 * half / nn;
    return Grid3({nn, nn, nn}, hh, {-half, -half, -half});
  }

  std::int64_t size() const {
    return std::int64_t(n[0]) * n[1] * n[2];
  }
  double cell_volume() const { return h * h * h; }

  std::int64_t index(int ix, int iy, int iz) const {
    return (std::int64_t(ix) * n[1] + iy) * n[2] + iz;
  }
  Vec3 center(int ix, int iy, int iz) const {
    return {lo[0] + (ix + 0.5) * h, lo[1] + (iy + 0.5) * h,
            lo[2] + (iz + 0.5) * h};
  }
  Vec3 center(std::int64_t idx) const {
    int iz = int(idx % n[2]);
    int iy = int((idx / n[2]) % n[1]);
    int ix = int(idx / (std::int64_t(n[1]) * n[2]));
    return center(ix, iy, iz);
  }
  Vec3 hi() const {
    return {lo[0] + n[0] * h, lo[1] + n[1] * h, lo[2] + n[2] * h};
  }
  // True if the closed box [a,b] of the other grid sits inside ours,
  // with slack for roundoff.
  bool contains_box(const Vec3& a, const Vec3& b, double slack = 1e-9) const {
    Vec3 u = hi();
    for (int d = 0; d < 3; ++d)
      if (a[d] < lo[d] - slack || b[d] > u[d] + slack) return false;
    return true;
  }

  std::vector<Vec3> centers() const {
    std::vector<Vec3> c;
    c.reserve(size_t(size()));
    for (int ix = 0; ix < n[0]; ++ix)
      for (int iy = 0; iy < n[1]; ++iy)
        for (int iz = 0; iz < n[2]; ++iz) c.push_back(center(ix, iy, iz));
    return c;
  }
};

// Complex scalar samples on the cells of a Grid3.
struct ScalarField {
  Grid3 grid;
  std::vector<cplx> values;

  ScalarField() = default;
  explicit ScalarField(const Grid3& g) : grid(g), values(size_t(g.size())) {}
  ScalarField(const Grid3& g, std::vector<cplx> v)
      : grid(g), values(std::move(v)) {
    if (std::int64_t(values.size()) != g.size())
      throw config_error("ScalarField: value count != grid size");
  }

  static ScalarField tabulate(const Grid3& g,
                              const std::function<cplx(const Vec3&)>& f) {
    ScalarField out(g);
    std::int64_t i = 0;
    for (int ix = 0; ix < g.n[0]; ++ix)
      for (int iy = 0; iy < g.n[1]; ++iy)
        for (int iz = 0; iz < g.n[2]; ++iz)
          out.values[size_t(i++)] = f(g.center(ix, iy, iz));
    return out;
  }

  cplx integrate() const {
    cplx s = 0.0;
    for (const cplx& v : values) s += v;
    return s * grid.cell_volume();
  }
  double sup_norm() const {
    double m = 0.0;
    for (const cplx& v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double l2_norm() const {
    double s = 0.0;
    for (const cplx& v : values) s += std::norm(v);
    return std::sqrt(s * grid.cell_volume());
  }
};

// Polynomially weighted L2 norm: || <x>^{-sigma} f ||_{L2(grid)}.
// <x> = sqrt(1 + |x|^2).  The optional mask restricts the sum.
double weighted_l2(const ScalarField& f, double sigma,
                   const std::vector<std::uint8_t>* mask = nullptr);

}  // namespace qscat
