#include "qscat/flux.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "qscat/resolvent.hpp"

namespace qscat {

namespace {
constexpr double kPi = std::numbers::pi;
}

FluxField flux_field(const ScalarField& psi) {
  const Grid3& g = psi.grid;
  FluxField f;
  f.grid = g;
  f.j.assign(size_t(g.size()), {0.0, 0.0, 0.0});
  const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
  auto idx = [&](int ix, int iy, int iz) {
    return size_t((std::int64_t(ix) * ny + iy) * nz + iz);
  };
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy)
      for (int iz = 0; iz < nz; ++iz) {
        size_t c = idx(ix, iy, iz);
        auto grad1d = [&](int d, int i, int n) -> cplx {
          // central in the interior, one-sided on the faces
          int ip = std::min(i + 1, n - 1), im = std::max(i - 1, 0);
          size_t p, m;
          if (d == 0) {
            p = idx(ip, iy, iz);
            m = idx(im, iy, iz);
          } else if (d == 1) {
            p = idx(ix, ip, iz);
            m = idx(ix, im, iz);
          } else {
            p = idx(ix, iy, ip);
            m = idx(ix, iy, im);
          }
          return (psi.values[p] - psi.values[m]) / (g.h * (ip - im));
        };
        cplx conj_c = std::conj(psi.values[c]);
        f.j[c] = {std::imag(conj_c * grad1d(0, ix, nx)),
                  std::imag(conj_c * grad1d(1, iy, ny)),
                  std::imag(conj_c * grad1d(2, iz, nz))};
      }
  return f;
}

AngularDensity angular_scattered_density(const Potential& V,
                                         const ScalarField& field,
                                         const WaveContext& wc, double R,
                                         const DirectionGrid& dirs) {
  const Grid3& g = field.grid;
  double grid_reach = std::max(norm(g.lo), norm(g.hi()));
  if (R <= grid_reach)
    throw geometry_error(
        "angular_scattered_density: R must clear the solve box");
  const double k = wc.kmag();

  // V A on the solve grid is the only source the scattered wave needs.
  ScalarField dens = field;
  {
    std::int64_t i = 0;
    for (int ix = 0; ix < g.n[0]; ++ix)
      for (int iy = 0; iy < g.n[1]; ++iy)
        for (int iz = 0; iz < g.n[2]; ++iz, ++i)
          dens.values[size_t(i)] *= V(g.center(ix, iy, iz));
  }

  AngularDensity out;
  out.dirs = dirs;
  out.R = R;
  out.sigma_flux.resize(dirs.size());

  std::vector<Vec3> pts;
  pts.reserve(dirs.size());
  for (const Vec3& th : dirs.dirs) pts.push_back(R * th);
  FieldAndGrad sc = apply_R0_grad(wc.energy(), dens, pts);

  for (size_t q = 0; q < dirs.size(); ++q) {
    // psi_sc = -R0(V A); the two sign flips cancel in Im(conj(psi) grad psi)
    cplx cpsi = std::conj(sc.value[q]);
    Vec3 jv;
    for (int d = 0; d < 3; ++d)
      jv[size_t(d)] = std::imag(cpsi * sc.grad[q][size_t(d)]);
    out.sigma_flux[q] = R * R * dot(jv, dirs.dirs[q]) / k;
  }
  return out;
}

double cross_section_total(const AmplitudeTable& amp) {
  return amp.total_cross_section();
}

// ---------------------------------------------------------------------------

namespace {

struct Tri {
  Vec3 a, b, c;
};

Vec3 normalized(const Vec3& v) { return (1.0 / norm(v)) * v; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

SurfacePatch SurfacePatch::sphere(double R, int refine) {
  if (R <= 0.0) throw config_error("SurfacePatch::sphere: R must be > 0");
  refine = std::clamp(refine, 0, 6);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (Vec3& p : v) p = normalized(p);
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  std::vector<Tri> tris;
  for (auto& t : f)
    tris.push_back({v[size_t(t[0])], v[size_t(t[1])], v[size_t(t[2])]});
  for (int lvl = 0; lvl < refine; ++lvl) {
    std::vector<Tri> next;
    next.reserve(tris.size() * 4);
    for (const Tri& t : tris) {
      Vec3 ab = normalized(0.5 * (t.a + t.b));
      Vec3 bc = normalized(0.5 * (t.b + t.c));
      Vec3 ca = normalized(0.5 * (t.c + t.a));
      next.push_back({t.a, ab, ca});
      next.push_back({t.b, bc, ab});
      next.push_back({t.c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  SurfacePatch patch;
  double flat_total = 0.0;
  for (const Tri& t : tris) {
    Vec3 ctr = normalized((1.0 / 3.0) * (t.a + t.b + t.c));
    patch.points.push_back(R * ctr);
    patch.normals.push_back(ctr);
    Vec3 e1 = R * t.b - R * t.a, e2 = R * t.c - R * t.a;
    double area = 0.5 * norm(cross(e1, e2));
    patch.areas.push_back(area);
    flat_total += area;
  }
  // Flat facets underestimate the sphere; rescale to the analytic area.
  double scale = 4.0 * kPi * R * R / flat_total;
  for (double& a : patch.areas) a *= scale;
  return patch;
}

SurfacePatch SurfacePatch::disk(const Vec3& c, const Vec3& nrm, double r,
                                int rings) {
  if (r <= 0.0) throw config_error("SurfacePatch::disk: r must be > 0");
  if (norm(nrm) == 0.0)
    throw config_error("SurfacePatch::disk: zero normal");
  rings = std::clamp(rings, 1, 512);
  Vec3 n = normalized(nrm);
  Vec3 seed = std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 u = normalized(cross(n, seed));
  Vec3 w = cross(n, u);
  SurfacePatch patch;
  for (int i = 0; i < rings; ++i) {
    double r0 = r * i / rings, r1 = r * (i + 1) / rings;
    double rm = 0.5 * (r0 + r1);
    int sectors = std::max(6, 6 * (i + 1));
    double ring_area = kPi * (r1 * r1 - r0 * r0);
    for (int j = 0; j < sectors; ++j) {
      double ang = 2.0 * kPi * (j + 0.5) / sectors;
      Vec3 p = c + (rm * std::cos(ang)) * u + (rm * std::sin(ang)) * w;
      patch.points.push_back(p);
      patch.normals.push_back(n);
      patch.areas.push_back(ring_area / sectors);
    }
  }
  return patch;
}

double SurfacePatch::total_area() const {
  double s = 0.0;
  for (double a : areas) s += a;
  return s;
}

double surface_flux(const FluxField& f, const SurfacePatch& patch) {
  const Grid3& g = f.grid;
  // Trilinear interpolation on the cell-centered lattice.
  auto sample = [&](const Vec3& p, int comp) {
    std::array<double, 3> s;
    std::array<int, 3> i0;
    for (int d = 0; d < 3; ++d) {
      double u = (p[size_t(d)] - g.lo[size_t(d)]) / g.h - 0.5;
      double fl = std::floor(u);
      i0[size_t(d)] = int(fl);
      s[size_t(d)] = u - fl;
      if (i0[size_t(d)] < 0 || i0[size_t(d)] + 1 >= g.n[size_t(d)])
        throw geometry_error("surface_flux: patch point outside the grid");
    }
    double acc = 0.0;
    for (int dx = 0; dx < 2; ++dx)
      for (int dy = 0; dy < 2; ++dy)
        for (int dz = 0; dz < 2; ++dz) {
          double wgt = (dx ? s[0] : 1 - s[0]) * (dy ? s[1] : 1 - s[1]) *
                       (dz ? s[2] : 1 - s[2]);
          size_t idx = size_t(
              (std::int64_t(i0[0] + dx) * g.n[1] + (i0[1] + dy)) * g.n[2] +
              (i0[2] + dz));
          acc += wgt * f.j[idx][size_t(comp)];
        }
    return acc;
  };
  double total = 0.0;
  for (size_t q = 0; q < patch.points.size(); ++q) {
    Vec3 jv{sample(patch.points[q], 0), sample(patch.points[q], 1),
            sample(patch.points[q], 2)};
    total += patch.areas[q] * dot(jv, patch.normals[q]);
  }
  return total;
}

}  // namespace qscat
