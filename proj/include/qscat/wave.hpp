#pragma once

#include <cmath>

#include "qscat/grid.hpp"

namespace qscat {

// Incident-wave bookkeeping: wavevector k, unit direction n = k/|k|,
// energy E_k = |k|^2/2, and for spherical sources the emitter distance D
// with position q_D = -n D (source recedes opposite to the propagation
// direction).
struct WaveContext {
  Vec3 k{0.0, 0.0, 1.0};
  double D = 0.0;  // 0 means plane-wave context

  WaveContext() = default;
  explicit WaveContext(const Vec3& k_, double D_ = 0.0) : k(k_), D(D_) {
    if (kmag() <= 0.0) throw config_error("WaveContext: |k| must be > 0");
    if (D < 0.0) throw config_error("WaveContext: D must be >= 0");
  }

  double kmag() const { return norm(k); }
  double energy() const { return 0.5 * dot(k, k); }
  Vec3 unit() const { return (1.0 / kmag()) * k; }
  Vec3 q_D() const { return (-D) * unit(); }
};

}  // namespace qscat
