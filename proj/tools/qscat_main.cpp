#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qscat/experiment.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw qscat::config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qscat: scattering cross-section laboratory"};
  app.require_subcommand(1);

  std::string config_path, outdir = "out";
  int workers = 1;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "JSON experiment config")
      ->required();
  run->add_option("--out", outdir, "output directory (default: out)");
  run->add_option("--workers", workers, "parallelism cap (>= 1)");

  std::string topic;
  auto* desc =
      app.add_subcommand("describe", "list kinds, catalog entries, formats");
  desc->add_option("topic", topic,
                   "kinds | catalog | formats | a catalog name");

  std::string vc_path;
  auto* vc = app.add_subcommand("validate-config",
                                "check a config without running it");
  vc->add_option("--config", vc_path, "JSON experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      auto t0 = std::chrono::steady_clock::now();
      qscat::ExperimentReport rep =
          qscat::run_experiment(slurp(config_path), outdir, workers);
      auto t1 = std::chrono::steady_clock::now();
      double secs = std::chrono::duration<double>(t1 - t0).count();
      for (const auto& c : rep.checks)
        std::cout << (c.passed ? "pass" : "FAIL") << "  " << c.name
                  << "  measured=" << c.measured << " allowed=" << c.allowed
                  << '\n';
      std::cout << rep.kind << ": " << (rep.passed ? "passed" : "FAILED")
                << " (" << secs << " s), artifacts in " << outdir << '\n';
      return rep.passed ? 0 : 1;
    }
    if (desc->parsed()) {
      std::cout << qscat::describe(topic);
      return 0;
    }
    if (vc->parsed()) {
      qscat::validate_config_text(slurp(vc_path));
      std::cout << "config ok\n";
      return 0;
    }
  } catch (const qscat::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const qscat::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
