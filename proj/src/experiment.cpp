#include "qscat/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>

#include "qscat/flux.hpp"
#include "qscat/io.hpp"
#include "qscat/oracle.hpp"
#include "qscat/resolvent.hpp"
#include "qscat/stationary.hpp"
#include "qscat/timedomain.hpp"

namespace qscat {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
}

void reject_keys(const json& j, std::initializer_list<const char*> keys,
                 const std::string& ctx) {
  if (!j.is_object()) throw config_error("config: " + ctx + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys)
      if (item.key() == k) known = true;
    if (!known)
      throw config_error("config: unknown key '" + item.key() + "' in " + ctx);
  }
}

double jnum(const json& j, const char* key, double def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number())
    throw config_error(std::string("config: '") + key + "' must be a number");
  return j[key].get<double>();
}

int jint(const json& j, const char* key, int def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number_integer())
    throw config_error(std::string("config: '") + key +
                       "' must be an integer");
  return j[key].get<int>();
}

bool jbool(const json& j, const char* key, bool def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_boolean())
    throw config_error(std::string("config: '") + key + "' must be a bool");
  return j[key].get<bool>();
}

std::string jstr(const json& j, const char* key, const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_string())
    throw config_error(std::string("config: '") + key + "' must be a string");
  return j[key].get<std::string>();
}

Vec3 jvec3(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3)
    throw config_error(std::string("config: '") + key +
                       "' must be a 3-vector");
  return {j[key][0].get<double>(), j[key][1].get<double>(),
          j[key][2].get<double>()};
}

ParamMap jparams(const json& j) {
  ParamMap p;
  if (j.contains("params")) {
    if (!j["params"].is_object())
      throw config_error("config: 'params' must be an object");
    for (const auto& item : j["params"].items()) {
      if (!item.value().is_number())
        throw config_error("config: parameter '" + item.key() +
                           "' must be a number");
      p[item.key()] = item.value().get<double>();
    }
  }
  return p;
}

struct ParsedConfig {
  std::string kind;
  Vec3 k{0, 0, 1};
  double distance = 0.0;
  Potential V;
  std::optional<FormFactor> rho;
  int grid_n = 32;
  double grid_half = 0.0;  // <= 0: potential support radius
  std::string directions = "product:16x32";
  SolveOptions solver;
  std::vector<double> distances;
  // evolution block
  double t_final = 0.0, dt = 0.0;
  int box_n = 0;
  double box_half = 0.0;
  double cap_fraction = 0.15, cap_strength = -1.0;
  double win0 = -1.0, win1 = -1.0;
  int snapshot_stride = 0;
  // flux block
  std::vector<double> flux_radii;
  std::string flux_dirs = "cube26";
  // oracle block
  int l_max = -1;
  // checks block
  double optical_tol = 0.02;
  double oracle_rms_tol = 0.01;
  double limit_tail_tol = 0.05;
  double limit_compare_tol = 0.05;
  double flux_match_tol = 0.05;
  bool compare_stationary = true;
  // output block
  bool out_fields = false;
  json echo;
};

const std::vector<std::string>& known_kinds() {
  static const std::vector<std::string> kinds = {
      "cross-section",      "convergence-D", "limiting-amplitude",
      "flux-check",         "oracle-compare", "hypothesis-check"};
  return kinds;
}

ParsedConfig parse_config(const json& j) {
  reject_keys(j, {"kind", "wave", "potential", "source", "grid", "directions",
                  "solver", "distances", "evolution", "flux", "oracle",
                  "checks", "output"},
              "top level");
  ParsedConfig c;
  c.echo = j;
  c.kind = jstr(j, "kind", "");
  bool kind_ok = false;
  for (const auto& k : known_kinds()) kind_ok = kind_ok || k == c.kind;
  if (!kind_ok)
    throw config_error("config: 'kind' must be one of cross-section, "
                       "convergence-D, limiting-amplitude, flux-check, "
                       "oracle-compare, hypothesis-check (got '" +
                       c.kind + "')");

  if (!j.contains("wave")) throw config_error("config: 'wave' is required");
  const json& w = j["wave"];
  reject_keys(w, {"k", "kmag", "direction", "distance"}, "wave");
  if (w.contains("k")) {
    c.k = jvec3(w, "k");
  } else {
    double km = jnum(w, "kmag", 1.0);
    Vec3 dir = w.contains("direction") ? jvec3(w, "direction") : Vec3{0, 0, 1};
    double dn = norm(dir);
    if (dn <= 0.0) throw config_error("config: wave.direction is zero");
    c.k = (km / dn) * dir;
  }
  if (norm(c.k) <= 0.0) throw config_error("config: |k| must be positive");
  c.distance = jnum(w, "distance", 0.0);
  if (c.distance < 0.0)
    throw config_error("config: wave.distance must be >= 0");

  if (!j.contains("potential"))
    throw config_error("config: 'potential' is required");
  reject_keys(j["potential"], {"name", "params"}, "potential");
  c.V = make_potential(jstr(j["potential"], "name", ""),
                       jparams(j["potential"]));

  if (j.contains("source")) {
    reject_keys(j["source"], {"name", "params"}, "source");
    c.rho = make_form_factor(jstr(j["source"], "name", ""),
                             jparams(j["source"]));
  }

  if (j.contains("grid")) {
    reject_keys(j["grid"], {"n", "halfwidth"}, "grid");
    c.grid_n = jint(j["grid"], "n", 32);
    c.grid_half = jnum(j["grid"], "halfwidth", 0.0);
    if (c.grid_n < 4 || c.grid_n > 256)
      throw config_error("config: grid.n outside [4, 256]");
  }
  c.directions = jstr(j, "directions", c.directions);

  if (j.contains("solver")) {
    const json& s = j["solver"];
    reject_keys(s, {"method", "tol", "restart", "max_iter", "lu_threshold"},
                "solver");
    std::string m = jstr(s, "method", "auto");
    if (m == "auto")
      c.solver.method = SolveMethod::kAuto;
    else if (m == "lu")
      c.solver.method = SolveMethod::kDenseLU;
    else if (m == "gmres")
      c.solver.method = SolveMethod::kGMRES;
    else if (m == "born")
      c.solver.method = SolveMethod::kBorn;
    else
      throw config_error("config: solver.method must be auto|lu|gmres|born");
    c.solver.tol = jnum(s, "tol", 1e-8);
    c.solver.restart = jint(s, "restart", 60);
    c.solver.max_iter = jint(s, "max_iter", 400);
    c.solver.lu_threshold = jint(s, "lu_threshold", 4096);
    if (c.solver.tol <= 0.0 || c.solver.tol >= 1.0)
      throw config_error("config: solver.tol outside (0, 1)");
  }

  if (j.contains("distances")) {
    if (!j["distances"].is_array() || j["distances"].size() < 2)
      throw config_error("config: 'distances' must list >= 2 values");
    for (const auto& v : j["distances"]) {
      if (!v.is_number() || v.get<double>() <= 0.0)
        throw config_error("config: distances must be positive numbers");
      c.distances.push_back(v.get<double>());
    }
  }

  if (j.contains("evolution")) {
    const json& e = j["evolution"];
    reject_keys(e, {"t_final", "dt", "n", "box_halfwidth", "cap_fraction",
                    "cap_strength", "window", "snapshot_stride"},
                "evolution");
    c.t_final = jnum(e, "t_final", 0.0);
    c.dt = jnum(e, "dt", 0.0);
    c.box_n = jint(e, "n", 0);
    c.box_half = jnum(e, "box_halfwidth", 0.0);
    c.cap_fraction = jnum(e, "cap_fraction", 0.15);
    c.cap_strength = jnum(e, "cap_strength", -1.0);
    c.snapshot_stride = jint(e, "snapshot_stride", 0);
    if (e.contains("window")) {
      if (!e["window"].is_array() || e["window"].size() != 2)
        throw config_error("config: evolution.window must be [t0, t1]");
      c.win0 = e["window"][0].get<double>();
      c.win1 = e["window"][1].get<double>();
    }
  }

  if (j.contains("flux")) {
    const json& f = j["flux"];
    reject_keys(f, {"radii", "directions"}, "flux");
    if (f.contains("radii")) {
      if (!f["radii"].is_array() || f["radii"].empty())
        throw config_error("config: flux.radii must be a nonempty array");
      for (const auto& v : f["radii"]) {
        if (!v.is_number() || v.get<double>() <= 0.0)
          throw config_error("config: flux.radii must be positive");
        c.flux_radii.push_back(v.get<double>());
      }
    }
    c.flux_dirs = jstr(f, "directions", c.flux_dirs);
  }

  if (j.contains("oracle")) {
    reject_keys(j["oracle"], {"l_max"}, "oracle");
    c.l_max = jint(j["oracle"], "l_max", -1);
  }

  if (j.contains("checks")) {
    const json& ch = j["checks"];
    reject_keys(ch, {"optical_theorem_tol", "oracle_rms_tol",
                     "limit_tail_tol", "limit_compare_tol", "flux_match_tol",
                     "compare_stationary"},
                "checks");
    c.optical_tol = jnum(ch, "optical_theorem_tol", c.optical_tol);
    c.oracle_rms_tol = jnum(ch, "oracle_rms_tol", c.oracle_rms_tol);
    c.limit_tail_tol = jnum(ch, "limit_tail_tol", c.limit_tail_tol);
    c.limit_compare_tol = jnum(ch, "limit_compare_tol", c.limit_compare_tol);
    c.flux_match_tol = jnum(ch, "flux_match_tol", c.flux_match_tol);
    c.compare_stationary = jbool(ch, "compare_stationary", true);
  }

  if (j.contains("output")) {
    reject_keys(j["output"], {"fields"}, "output");
    c.out_fields = jbool(j["output"], "fields", false);
  }

  // Kind-specific requirements.
  auto need = [&](bool cond, const std::string& what) {
    if (!cond)
      throw config_error("config: kind '" + c.kind + "' requires " + what);
  };
  if (c.kind == "convergence-D") {
    need(c.rho.has_value(), "a 'source'");
    need(!c.distances.empty(), "'distances'");
  }
  if (c.kind == "limiting-amplitude") {
    need(c.rho.has_value(), "a 'source'");
    need(c.t_final > 0.0, "evolution.t_final > 0");
    need(c.box_n >= 8, "evolution.n >= 8");
    need(c.box_half > 0.0, "evolution.box_halfwidth > 0");
  }
  if (c.kind == "flux-check") need(!c.flux_radii.empty(), "flux.radii");
  if (c.V.is_zero() && c.grid_half <= 0.0 &&
      (c.kind == "cross-section" || c.kind == "flux-check" ||
       c.kind == "oracle-compare"))
    throw config_error(
        "config: grid.halfwidth must be set when the potential is zero");
  return c;
}

Grid3 solve_grid(const ParsedConfig& c) {
  double half = c.grid_half > 0.0 ? c.grid_half : c.V.support_radius;
  return Grid3::cube(c.grid_n, half);
}

void push_check(ExperimentReport& rep, const std::string& name, bool passed,
                double measured, double allowed, const std::string& detail) {
  rep.checks.push_back({name, passed, measured, allowed, detail});
}

// ---------------------------------------------------------------------------

ExperimentReport run_cross_section(const ParsedConfig& c, const fs::path& out) {
  ExperimentReport rep;
  rep.kind = c.kind;
  WaveContext wc(c.k);
  Grid3 grid = solve_grid(c);
  LSSolution sol = solve_plane(c.V, wc, grid, c.solver);
  if (!sol.warning.empty()) rep.warnings.push_back(sol.warning);
  push_check(rep, "solver_residual", sol.residual <= c.solver.tol,
             sol.residual, c.solver.tol, "relative Lippmann-Schwinger residual");

  DirectionGrid dirs = DirectionGrid::parse(c.directions);
  AmplitudeTable amp = amplitude(c.V, sol, dirs);
  write_amplitude_csv(amp, (out / "amplitude.csv").string());
  rep.artifacts.push_back("amplitude.csv");

  // a = -4 pi^2 T through the independent quadrature path.
  Vec3 n = wc.unit();
  TMatrixValue tv = t_matrix(c.V, sol, n);
  double ascale = std::abs(tv.a);
  for (const cplx& a : amp.a) ascale = std::max(ascale, std::abs(a));
  double iden = std::abs(tv.a - (-4.0 * kPi * kPi * tv.T)) /
                std::max(ascale, 1e-300);
  push_check(rep, "amplitude_tmatrix_identity", iden <= 1e-12, iden, 1e-12,
             "|a + 4 pi^2 T| / max|a| at the forward direction");

  double sigma_tot = amp.total_cross_section();
  double lhs = std::imag(tv.a);
  double rhs = wc.kmag() * sigma_tot / (4.0 * kPi);
  double dev = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
  if (sigma_tot == 0.0 && lhs == 0.0) dev = 0.0;
  push_check(rep, "optical_theorem", dev <= c.optical_tol, dev, c.optical_tol,
             "Im a(n) vs |k| sigma_tot / 4pi");

  if (c.out_fields) {
    write_field(sol.field, (out / "field.bin").string());
    rep.artifacts.push_back("field.bin");
    rep.artifacts.push_back("field.bin.json");
  }
  return rep;
}

ExperimentReport run_convergence(const ParsedConfig& c, const fs::path& out) {
  ExperimentReport rep;
  rep.kind = c.kind;
  Grid3 grid = solve_grid(c);
  DirectionGrid dirs = DirectionGrid::parse(c.directions);
  ConvergenceReport conv = convergence_study(c.V, *c.rho, c.k, c.distances,
                                             grid, dirs, c.solver);
  write_convergence_json(conv, (out / "convergence.json").string());
  rep.artifacts.push_back("convergence.json");
  push_check(rep, "field_error_decreasing", conv.monotone_field,
             conv.monotone_field ? 1.0 : 0.0, 1.0,
             "||A_D - A||_w strictly decreasing in D");
  push_check(rep, "amplitude_error_decreasing", conv.monotone_amp,
             conv.monotone_amp ? 1.0 : 0.0, 1.0,
             "max|a_D - a| strictly decreasing in D");
  bool slope_ok = conv.slope_incident >= -1.3 && conv.slope_incident <= -0.7;
  push_check(rep, "incident_slope_near_minus_one", slope_ok,
             conv.slope_incident, -0.7,
             "log-log slope of sup|inc_D/b_D - plane|, expected in "
             "[-1.3, -0.7]");
  return rep;
}

ExperimentReport run_limiting_amplitude(const ParsedConfig& c,
                                        const fs::path& out) {
  ExperimentReport rep;
  rep.kind = c.kind;
  WaveContext wc(c.k, c.distance);
  Grid3 grid = Grid3::cube(c.box_n, c.box_half);
  EvolveParams params;
  params.dt = c.dt;
  params.t_final = c.t_final;
  params.snapshot_stride = c.snapshot_stride;
  params.cap.fraction = c.cap_fraction;
  params.cap.strength = c.cap_strength;
  Trajectory traj = evolve(c.V, &*c.rho, wc, grid, params);
  if (!traj.warning.empty()) rep.warnings.push_back(traj.warning);

  double w0 = c.win0 >= 0.0 ? c.win0 : 0.7 * c.t_final;
  double w1 = c.win1 >= 0.0 ? c.win1 : c.t_final;
  LimitAmplitudeEstimate est = extract_limit_amplitude(traj, w0, w1);
  write_residual_csv(est.times, est.residual,
                     (out / "residual_history.csv").string());
  rep.artifacts.push_back("residual_history.csv");
  write_field(est.b_hat, (out / "bhat.bin").string());
  rep.artifacts.push_back("bhat.bin");
  rep.artifacts.push_back("bhat.bin.json");

  push_check(rep, "tail_residual_small", est.tail_ratio <= c.limit_tail_tol,
             est.tail_ratio, c.limit_tail_tol,
             "r(t_final) / ||B_hat||_w over the CAP-free region");
  push_check(rep, "tail_residual_decreasing", est.tail_decreasing,
             est.tail_decreasing ? 1.0 : 0.0, 1.0,
             "per-period means decrease over the final 3 driving periods");

  if (c.compare_stationary) {
    LSSolution stat = solve_driven(c.V, *c.rho, wc, grid, c.solver);
    if (!stat.warning.empty()) rep.warnings.push_back(stat.warning);
    std::vector<std::uint8_t> mask(traj.damping.size());
    for (size_t i = 0; i < mask.size(); ++i)
      mask[i] = traj.damping[i] == 0.0 ? 1 : 0;
    ScalarField diff = est.b_hat;
    for (size_t i = 0; i < diff.values.size(); ++i)
      diff.values[i] -= stat.field.values[i];
    double num = weighted_l2(diff, est.weight_sigma, &mask);
    double den = weighted_l2(stat.field, est.weight_sigma, &mask);
    double rel = num / std::max(den, 1e-300);
    push_check(rep, "matches_stationary", rel <= c.limit_compare_tol, rel,
               c.limit_compare_tol,
               "||B_hat - B_D||_w / ||B_D||_w, CAP-free region");
    if (c.out_fields) {
      write_field(stat.field, (out / "stationary.bin").string());
      rep.artifacts.push_back("stationary.bin");
      rep.artifacts.push_back("stationary.bin.json");
    }
  }
  return rep;
}

ExperimentReport run_flux_check(const ParsedConfig& c, const fs::path& out) {
  ExperimentReport rep;
  rep.kind = c.kind;
  Grid3 grid = solve_grid(c);
  DirectionGrid fdirs = DirectionGrid::parse(c.flux_dirs);

  // Reference sigma(theta) and the normalized field: spherical-source
  // route when a source is configured, plane-wave route otherwise.
  ScalarField field;
  AmplitudeTable amp;
  WaveContext wc(c.k);
  if (c.rho.has_value() && c.distance > 0.0) {
    WaveContext wcs(c.k, c.distance);
    LSSolution sol = solve_spherical(c.V, *c.rho, wcs, grid, c.solver);
    field = normalized_AD(sol, *c.rho);
    amp = amplitude_normalized(c.V, sol, *c.rho, fdirs);
    wc = wcs;
  } else {
    LSSolution sol = solve_plane(c.V, wc, grid, c.solver);
    if (!sol.warning.empty()) rep.warnings.push_back(sol.warning);
    field = sol.field;
    amp = amplitude(c.V, sol, fdirs);
  }
  double sig_max = 0.0;
  for (double s : amp.sigma) sig_max = std::max(sig_max, s);

  std::vector<double> devs;
  AngularDensity last;
  for (double R : c.flux_radii) {
    last = angular_scattered_density(c.V, field, wc, R, fdirs);
    double dev = 0.0;
    for (size_t q = 0; q < fdirs.size(); ++q)
      dev = std::max(dev, std::abs(last.sigma_flux[q] - amp.sigma[q]));
    devs.push_back(dev / std::max(sig_max, 1e-300));
  }

  {
    std::ofstream os((out / "flux_sigma.csv"));
    os << "theta_x,theta_y,theta_z,sigma_flux,sigma_amp,rel_dev\n";
    for (size_t q = 0; q < fdirs.size(); ++q) {
      const Vec3& d = fdirs.dirs[q];
      double rd = std::abs(last.sigma_flux[q] - amp.sigma[q]) /
                  std::max(sig_max, 1e-300);
      os << fmt_double(d[0]) << ',' << fmt_double(d[1]) << ','
         << fmt_double(d[2]) << ',' << fmt_double(last.sigma_flux[q]) << ','
         << fmt_double(amp.sigma[q]) << ',' << fmt_double(rd) << '\n';
    }
  }
  rep.artifacts.push_back("flux_sigma.csv");

  push_check(rep, "flux_matches_sigma", devs.back() <= c.flux_match_tol,
             devs.back(), c.flux_match_tol,
             "max_theta |R^2 j_r/|k| - sigma| / max sigma at the largest R");
  if (devs.size() >= 2) {
    double slope = loglog_slope(c.flux_radii, devs);
    push_check(rep, "flux_deviation_decay", slope <= -1.0, slope, -1.0,
               "log-log slope of the flux-sigma deviation vs R");
  }
  return rep;
}

ExperimentReport run_oracle_compare(const ParsedConfig& c,
                                    const fs::path& out) {
  ExperimentReport rep;
  rep.kind = c.kind;
  WaveContext wc(c.k);
  Grid3 grid = solve_grid(c);
  LSSolution sol = solve_plane(c.V, wc, grid, c.solver);
  if (!sol.warning.empty()) rep.warnings.push_back(sol.warning);
  DirectionGrid dirs = DirectionGrid::parse(c.directions);
  AmplitudeTable amp = amplitude(c.V, sol, dirs);
  PhaseShiftSet ps = phase_shifts(c.V, wc.kmag(), c.l_max);
  write_phase_shift_csv(ps, (out / "phase_shifts.csv").string());
  rep.artifacts.push_back("phase_shifts.csv");

  Vec3 n = wc.unit();
  double rms = 0.0, amax = 0.0;
  {
    std::ofstream os((out / "amp_compare.csv"));
    os << "cos_theta,re_a_nystrom,im_a_nystrom,re_a_partial_wave,"
          "im_a_partial_wave,abs_diff\n";
    for (size_t q = 0; q < dirs.size(); ++q) {
      double ct = dot(dirs.dirs[q], n);
      cplx f = partial_wave_amplitude(ps, ct);
      double d = std::abs(amp.a[q] - f);
      rms += d * d;
      amax = std::max(amax, std::abs(amp.a[q]));
      os << fmt_double(ct) << ',' << fmt_double(amp.a[q].real()) << ','
         << fmt_double(amp.a[q].imag()) << ',' << fmt_double(f.real()) << ','
         << fmt_double(f.imag()) << ',' << fmt_double(d) << '\n';
    }
    rms = std::sqrt(rms / double(dirs.size()));
  }
  rep.artifacts.push_back("amp_compare.csv");
  double rel = rms / std::max(amax, 1e-300);
  push_check(rep, "oracle_agreement", rel <= c.oracle_rms_tol, rel,
             c.oracle_rms_tol,
             "RMS |a_nystrom - a_partial_wave| / max|a| over directions");
  return rep;
}

ExperimentReport run_hypothesis_check(const ParsedConfig& c,
                                      const fs::path& out) {
  ExperimentReport rep;
  rep.kind = c.kind;
  json art;
  ValidationReport vp = validate_potential(c.V);
  for (const auto& ch : vp.checks)
    push_check(rep, ch.name, ch.passed, ch.measured, ch.allowed, ch.detail);
  art["potential"] = {{"name", c.V.name},
                      {"support_radius", c.V.support_radius},
                      {"envelope_C", c.V.envelope_C},
                      {"passed", vp.passed}};
  if (c.rho.has_value()) {
    ValidationReport vf = validate_form_factor(*c.rho);
    for (const auto& ch : vf.checks)
      push_check(rep, ch.name, ch.passed, ch.measured, ch.allowed, ch.detail);
    DirectionGrid dirs = DirectionGrid::parse(c.directions);
    WienerResult wr = wiener_check(*c.rho, norm(c.k), dirs);
    push_check(rep, "wiener_positive_minimum", wr.passed, wr.min_abs, wr.tol,
               "min_j |rho_hat(|k| theta_j)| must exceed the floor");
    art["source"] = {{"name", c.rho->name},
                     {"support_radius", c.rho->support_radius},
                     {"passed", vf.passed}};
    art["wiener"] = {{"min_abs", wr.min_abs}, {"tol", wr.tol}};
  }
  std::ofstream os((out / "validation.json"));
  os << art.dump(2) << '\n';
  rep.artifacts.push_back("validation.json");
  return rep;
}

json report_to_json(const ExperimentReport& rep, const json& echo) {
  json j;
  j["kind"] = rep.kind;
  j["passed"] = rep.passed;
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"allowed", c.allowed},
                      {"detail", c.detail}});
  j["checks"] = checks;
  j["artifacts"] = rep.artifacts;
  j["warnings"] = rep.warnings;
  j["config"] = echo;
  return j;
}

}  // namespace

void validate_config_text(const std::string& config_json) {
  parse_config(parse_json_text(config_json));
}

ExperimentReport run_experiment(const std::string& config_json,
                                const std::string& outdir, int workers) {
  if (workers < 1)
    throw config_error("run_experiment: workers must be >= 1");
  ParsedConfig c = parse_config(parse_json_text(config_json));
  fs::path out(outdir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec)
    throw config_error("run_experiment: cannot create outdir " + outdir);

  ExperimentReport rep;
  try {
    if (c.kind == "cross-section")
      rep = run_cross_section(c, out);
    else if (c.kind == "convergence-D")
      rep = run_convergence(c, out);
    else if (c.kind == "limiting-amplitude")
      rep = run_limiting_amplitude(c, out);
    else if (c.kind == "flux-check")
      rep = run_flux_check(c, out);
    else if (c.kind == "oracle-compare")
      rep = run_oracle_compare(c, out);
    else
      rep = run_hypothesis_check(c, out);
  } catch (const numeric_error& e) {
    std::ofstream marker(out / "FAILED");
    marker << c.kind << ": " << e.what() << '\n';
    throw;
  }

  rep.passed = true;
  for (const auto& ch : rep.checks) rep.passed = rep.passed && ch.passed;
  {
    std::ofstream os(out / "report.json");
    os << report_to_json(rep, c.echo).dump(2) << '\n';
  }
  rep.artifacts.push_back("report.json");
  return rep;
}

std::string describe(const std::string& filter) {
  std::string kinds =
      "experiment kinds:\n"
      "  cross-section       plane-wave solve; amplitude table, T-matrix\n"
      "                      identity, optical-theorem check\n"
      "  convergence-D       spherical-source solves over emitter distances;\n"
      "                      incident/field/amplitude error decay\n"
      "  limiting-amplitude  driven Crank-Nicolson evolution with absorbing\n"
      "                      shell; windowed limit vs stationary solution\n"
      "  flux-check          far-zone radial current vs differential cross\n"
      "                      section on a direction set\n"
      "  oracle-compare      Nystrom amplitude vs radial partial-wave solver\n"
      "  hypothesis-check    decay/smoothness envelopes and Wiener condition\n";
  std::string formats =
      "artifact formats:\n"
      "  amplitude.csv         theta_x,theta_y,theta_z,re_a,im_a,sigma\n"
      "  convergence.json      {D[], err_incident[], err_field[], err_amp[],\n"
      "                         slopes{}, monotone{}}\n"
      "  residual_history.csv  t,r\n"
      "  phase_shifts.csv      l,delta,delta_born\n"
      "  flux_sigma.csv        theta,sigma_flux,sigma_amp,rel_dev\n"
      "  *.bin (+ .json)       complex128 row-major z-fastest field dump\n"
      "  report.json           checks with measured/allowed + config echo\n";
  std::string cat = "catalog:\n";
  for (const auto& e : catalog())
    cat += "  " + e.name + std::string(e.name.size() < 20 ? 20 - e.name.size() : 1, ' ') +
           e.kind + "  " + e.signature + "  " + e.notes + "\n";

  if (filter.empty()) return kinds + "\n" + cat + "\n" + formats;
  if (filter == "kinds") return kinds;
  if (filter == "catalog") return cat;
  if (filter == "formats") return formats;
  for (const auto& e : catalog())
    if (e.name == filter)
      return e.name + " (" + e.kind + ")\n  signature: " + e.signature +
             "\n  " + e.notes + "\n";
  throw config_error("describe: unknown topic '" + filter + "'");
}

}  // namespace qscat
