#pragma once

#include <stdexcept>
#include <string>

namespace qscat {

// Error taxonomy mirrors the CLI exit codes: config/usage problems are
// config_error (exit 2), numerical failures are numeric_error (exit 3).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry preconditions (targets inside source support, overlapping
// source/potential boxes, radii not outside support, ...).
struct geometry_error : config_error {
  using config_error::config_error;
};

// Evaluation of a singular kernel at coincident points.
struct singular_point_error : numeric_error {
  using numeric_error::numeric_error;
};

// Quadrature / iteration refinement failed to converge.
struct resolution_error : numeric_error {
  using numeric_error::numeric_error;
};

struct convergence_error : numeric_error {
  using numeric_error::numeric_error;
};

// |b(n)| below the Wiener floor: the spherical normalization is undefined.
struct degenerate_source_error : numeric_error {
  using numeric_error::numeric_error;
};

struct blow_up_error : numeric_error {
  using numeric_error::numeric_error;
};

}  // namespace qscat
