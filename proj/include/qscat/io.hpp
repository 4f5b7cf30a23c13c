#pragma once

#include <string>
#include <vector>

#include "qscat/grid.hpp"
#include "qscat/oracle.hpp"
#include "qscat/stationary.hpp"
#include "qscat/timedomain.hpp"

namespace qscat {

// Shortest round-trip decimal for a double (deterministic across runs).
std::string fmt_double(double v);

// amplitude table -> CSV: theta_x,theta_y,theta_z,re_a,im_a,sigma
void write_amplitude_csv(const AmplitudeTable& t, const std::string& path);

// residual history -> CSV: t,r
void write_residual_csv(const std::vector<double>& t,
                        const std::vector<double>& r, const std::string& path);

// phase shifts -> CSV: l,delta,delta_born
void write_phase_shift_csv(const PhaseShiftSet& ps, const std::string& path);

// convergence report -> JSON file
void write_convergence_json(const ConvergenceReport& rep,
                            const std::string& path);

// Complex field <-> flat little-endian binary (interleaved re,im doubles)
// with a JSON sidecar (<path>.json) recording dims, h, lo, count.
void write_field(const ScalarField& f, const std::string& path);
ScalarField read_field(const std::string& path);

}  // namespace qscat
