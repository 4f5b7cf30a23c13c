#include "qscat/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>

namespace qscat {

using nlohmann::json;

std::string fmt_double(double v) {
  // Shortest decimal that round-trips; deterministic across runs.
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw config_error("io: cannot open for writing: " + path);
  return os;
}

}  // namespace

void write_amplitude_csv(const AmplitudeTable& t, const std::string& path) {
  std::ofstream os = open_out(path);
  os << "theta_x,theta_y,theta_z,re_a,im_a,sigma\n";
  for (size_t j = 0; j < t.dirs.size(); ++j) {
    const Vec3& d = t.dirs.dirs[j];
    os << fmt_double(d[0]) << ',' << fmt_double(d[1]) << ','
       << fmt_double(d[2]) << ',' << fmt_double(t.a[j].real()) << ','
       << fmt_double(t.a[j].imag()) << ',' << fmt_double(t.sigma[j]) << '\n';
  }
}

void write_residual_csv(const std::vector<double>& t,
                        const std::vector<double>& r,
                        const std::string& path) {
  if (t.size() != r.size())
    throw config_error("write_residual_csv: length mismatch");
  std::ofstream os = open_out(path);
  os << "t,r\n";
  for (size_t i = 0; i < t.size(); ++i)
    os << fmt_double(t[i]) << ',' << fmt_double(r[i]) << '\n';
}

void write_phase_shift_csv(const PhaseShiftSet& ps, const std::string& path) {
  std::ofstream os = open_out(path);
  os << "l,delta,delta_born\n";
  for (int l = 0; l <= ps.l_max; ++l)
    os << l << ',' << fmt_double(ps.delta[size_t(l)]) << ','
       << fmt_double(ps.delta_born[size_t(l)]) << '\n';
}

void write_convergence_json(const ConvergenceReport& rep,
                            const std::string& path) {
  json j;
  j["D"] = rep.D;
  j["err_incident"] = rep.err_incident;
  j["err_field"] = rep.err_field;
  j["err_amp"] = rep.err_amp;
  j["slopes"] = {{"incident", rep.slope_incident},
                 {"field", rep.slope_field},
                 {"amp", rep.slope_amp}};
  j["monotone"] = {{"field", rep.monotone_field},
                   {"amp", rep.monotone_amp}};
  std::ofstream os = open_out(path);
  os << j.dump(2) << '\n';
}

void write_field(const ScalarField& f, const std::string& path) {
  {
    std::ofstream os = open_out(path, true);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             std::streamsize(f.values.size() * sizeof(cplx)));
    if (!os) throw config_error("write_field: short write to " + path);
  }
  json side;
  side["dims"] = {f.grid.n[0], f.grid.n[1], f.grid.n[2]};
  side["h"] = f.grid.h;
  side["lo"] = {f.grid.lo[0], f.grid.lo[1], f.grid.lo[2]};
  side["count"] = f.values.size();
  side["layout"] = "row-major z-fastest, complex128 little-endian";
  std::ofstream os = open_out(path + ".json");
  os << side.dump(2) << '\n';
}

ScalarField read_field(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw config_error("read_field: missing sidecar for " + path);
  json j = json::parse(side);
  std::array<int, 3> n{j["dims"][0], j["dims"][1], j["dims"][2]};
  Vec3 lo{j["lo"][0], j["lo"][1], j["lo"][2]};
  Grid3 g(n, j["h"], lo);
  ScalarField f(g);
  std::ifstream is(path, std::ios::binary);
  if (!is) throw config_error("read_field: cannot open " + path);
  is.read(reinterpret_cast<char*>(f.values.data()),
          std::streamsize(f.values.size() * sizeof(cplx)));
  if (!is) throw config_error("read_field: truncated file " + path);
  return f;
}

}  // namespace qscat
