#include "qscat/grid.hpp"

namespace qscat {

double weighted_l2(const ScalarField& f, double sigma,
                   const std::vector<std::uint8_t>* mask) {
  const Grid3& g = f.grid;
  if (mask && std::int64_t(mask->size()) != g.size())
    throw config_error("weighted_l2: mask size mismatch");
  double s = 0.0;
  std::int64_t i = 0;
  for (int ix = 0; ix < g.n[0]; ++ix)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int iz = 0; iz < g.n[2]; ++iz, ++i) {
        if (mask && !(*mask)[size_t(i)]) continue;
        Vec3 x = g.center(ix, iy, iz);
        double w = std::pow(1.0 + dot(x, x), -sigma);
        s += w * std::norm(f.values[size_t(i)]);
      }
  return std::sqrt(s * g.cell_volume());
}

}  // namespace qscat
