#pragma once

#include <string>
#include <vector>

#include "qscat/grid.hpp"

namespace qscat {

// Unit directions with quadrature weights summing to 4*pi.
struct DirectionGrid {
  std::vector<Vec3> dirs;
  std::vector<double> weights;
  std::string rule;

  size_t size() const { return dirs.size(); }

  // Scheme "product:NTHETAxNPHI": Gauss-Legendre nodes in cos(theta)
  // crossed with midpoint-uniform phi.  Integrates spherical harmonics
  // exactly up to degree min(2*n_theta - 1, n_phi - 1).
  static DirectionGrid product(int n_theta, int n_phi);

  // Classical 26-point degree-7 cube rule: face centers, edge midpoints,
  // corners with weights (40, 32, 27)/840 * 4*pi.
  static DirectionGrid cube26();

  // Fibonacci-sphere point set with equal weights 4*pi/n.  Not a
  // polynomial rule; used where a quasi-uniform direction *sample* is
  // wanted rather than a quadrature.
  static DirectionGrid fibonacci(int n);

  // Parse "product:16x32", "cube26", "fibonacci:50".
  static DirectionGrid parse(const std::string& scheme);

  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

// Gauss-Legendre nodes/weights on [-1, 1] (Newton on the Legendre
// polynomial; exact for degree 2n-1).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace qscat
