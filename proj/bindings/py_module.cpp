// Python surface: config-driven experiments plus a few direct solves.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qscat/catalog.hpp"
#include "qscat/directions.hpp"
#include "qscat/errors.hpp"
#include "qscat/experiment.hpp"
#include "qscat/grid.hpp"
#include "qscat/oracle.hpp"
#include "qscat/stationary.hpp"
#include "qscat/wave.hpp"

namespace py = pybind11;
using namespace qscat;

namespace {

py::dict report_to_dict(const ExperimentReport& rep) {
  py::list checks;
  for (const auto& c : rep.checks) {
    py::dict d;
    d["name"] = c.name;
    d["passed"] = c.passed;
    d["measured"] = c.measured;
    d["allowed"] = c.allowed;
    d["detail"] = c.detail;
    checks.append(d);
  }
  py::dict r;
  r["kind"] = rep.kind;
  r["passed"] = rep.passed;
  r["checks"] = checks;
  r["artifacts"] = py::cast(rep.artifacts);
  r["warnings"] = py::cast(rep.warnings);
  return r;
}

SolveMethod method_from(const std::string& m) {
  if (m == "auto") return SolveMethod::kAuto;
  if (m == "lu") return SolveMethod::kDenseLU;
  if (m == "gmres") return SolveMethod::kGMRES;
  if (m == "born") return SolveMethod::kBorn;
  throw config_error("method must be auto|lu|gmres|born");
}

py::dict cross_section(const std::string& potential, const ParamMap& params,
                       const Vec3& k, int n, double halfwidth,
                       const std::string& directions, const std::string& method,
                       double tol) {
  Potential V = make_potential(potential, params);
  WaveContext wc(k);
  double half = halfwidth > 0.0 ? halfwidth : V.support_radius;
  if (half <= 0.0)
    throw config_error("halfwidth is required when the potential is zero");
  Grid3 grid = Grid3::cube(n, half);
  SolveOptions opts;
  opts.method = method_from(method);
  opts.tol = tol;
  LSSolution sol = solve_plane(V, wc, grid, opts);
  AmplitudeTable amp = amplitude(V, sol, DirectionGrid::parse(directions));
  py::dict out;
  out["directions"] = py::cast(amp.dirs.dirs);
  out["a"] = py::cast(amp.a);
  out["sigma"] = py::cast(amp.sigma);
  out["total"] = amp.total_cross_section();
  out["residual"] = sol.residual;
  out["method"] = sol.method;
  out["iterations"] = sol.iterations;
  if (!sol.warning.empty()) out["warning"] = sol.warning;
  return out;
}

py::dict phase_shift_dict(const std::string& potential, const ParamMap& params,
                          double k, int l_max) {
  PhaseShiftSet ps = phase_shifts(make_potential(potential, params), k, l_max);
  py::dict out;
  out["k"] = ps.k;
  out["delta"] = py::cast(ps.delta);
  out["delta_born"] = py::cast(ps.delta_born);
  out["l_max"] = ps.l_max;
  out["r_match"] = ps.r_match;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scattering cross-section laboratory (C++ core bindings)";

  py::register_exception<numeric_error>(m, "NumericError", PyExc_RuntimeError);
  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);

  m.def("describe", &describe, py::arg("topic") = "",
        "Human-readable listing of experiment kinds, catalog, formats.");
  m.def("validate_config", &validate_config_text, py::arg("config_json"),
        "Schema/range validation of an experiment config (raises on error).");
  m.def(
      "run",
      [](const std::string& config_json, const std::string& outdir,
         int workers) {
        return report_to_dict(run_experiment(config_json, outdir, workers));
      },
      py::arg("config_json"), py::arg("outdir"), py::arg("workers") = 1,
      "Run an experiment config; writes artifacts + report.json to outdir.");
  m.def(
      "catalog",
      [] {
        py::list out;
        for (const auto& e : catalog()) {
          py::dict d;
          d["name"] = e.name;
          d["kind"] = e.kind;
          d["signature"] = e.signature;
          d["notes"] = e.notes;
          out.append(d);
        }
        return out;
      },
      "Potential / form-factor catalog entries.");
  m.def("cross_section", &cross_section, py::arg("potential"),
        py::arg("params") = ParamMap{}, py::arg("k") = Vec3{0.0, 0.0, 1.0},
        py::arg("n") = 24, py::arg("halfwidth") = 0.0,
        py::arg("directions") = "product:8x16", py::arg("method") = "auto",
        py::arg("tol") = 1e-8,
        "Plane-wave solve; returns amplitudes and sigma(theta) per direction.");
  m.def("phase_shifts", &phase_shift_dict, py::arg("potential"),
        py::arg("params") = ParamMap{}, py::arg("k") = 1.0,
        py::arg("l_max") = -1,
        "Radial partial-wave oracle for a catalog potential.");
  m.def(
      "bound_states",
      [](const std::string& potential, const ParamMap& params) {
        return bound_state_count(make_potential(potential, params));
      },
      py::arg("potential"), py::arg("params") = ParamMap{},
      "Bound-state count (2l+1 multiplicity) of a catalog potential.");
}
