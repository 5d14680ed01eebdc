#include <omp.h>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nbch/experiments.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{
      "Newton-Boussinesq channel scenarios: runs one verification scenario "
      "and reports pass/fail (exit 0 pass, 1 fail, 2 config error)"};

  std::string scenario, config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("scenario", scenario,
                 "decay | absorb | tail | regularity | convergence | inequalities")
      ->required();
  app.add_option("--config", config_path, "JSON scenario config")->required();
  app.add_option("--out", out_dir,
                 "directory for CSV/JSON outputs; relative out.* paths from "
                 "the config land here, defaults <scenario>.csv/.json");
  auto* seed_opt =
      app.add_option("--seed", seed, "overrides ic.seed from the config");
  auto* threads_opt =
      app.add_option("--threads", threads, "OpenMP thread count")
          ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    nbch::ScenarioConfig cfg = nbch::load_config(config_path);
    cfg.scenario = scenario;
    if (*seed_opt) cfg.ic_seed = seed;
    if (*threads_opt) omp_set_num_threads(threads);

    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      auto place = [&](std::string& p, const std::string& dflt) {
        if (p.empty()) p = dflt;
        if (fs::path(p).is_relative()) p = (fs::path(out_dir) / p).string();
      };
      place(cfg.out_csv, scenario + ".csv");
      place(cfg.out_json, scenario + ".json");
    }

    const nbch::RunResult r = nbch::run_scenario(cfg);
    if (cfg.out_json.empty())
      std::cout << r.report.dump(2) << "\n";
    else
      std::cout << "report: " << cfg.out_json << "\n";
    if (!cfg.out_csv.empty()) std::cout << "series: " << cfg.out_csv << "\n";
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << scenario << "\n";
    return r.pass ? 0 : 1;
  } catch (const nbch::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
