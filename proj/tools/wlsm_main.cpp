#include "wlsm/errors.hpp"
#include "wlsm/runner/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit : int { ok = 0, replay_mismatch = 1, config_error = 2, numeric_error = 3 };

}  // namespace

int main(int argc, char** argv) {
  using namespace wlsm::runner;
  CLI::App app{"Weighted linear sampling experiments for limited-aperture inverse scattering"};
  app.require_subcommand(1);

  std::string config_path, manifest_path;
  RunOptions opt;
  std::uint64_t seed = 0;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out_dir, "output directory (default: config output.dir, else out/<name>)");
    sub->add_option("--threads", opt.threads, "worker threads for the index and forward solvers")
        ->check(CLI::Range(1, 1024));
    sub->add_flag("--quiet,-q", quiet, "suppress the summary table");
  };

  CLI::App* run = app.add_subcommand("run", "simulate data, compute weights and index fields");
  run->add_option("config", config_path, "experiment config (YAML)")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override noise.seed");
  add_common(run);

  CLI::App* diag = app.add_subcommand("diagnose", "kernel comparison, stability sweeps and concentration table");
  diag->add_option("config", config_path, "diagnose config (YAML)")->required();
  add_common(diag);

  CLI::App* rep = app.add_subcommand("replay", "re-run a manifest and compare output hashes");
  rep->add_option("manifest", manifest_path, "manifest.json written by run or diagnose")->required();
  add_common(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }
  if (!quiet) opt.log = &std::cout;
  if (*seed_opt) opt.seed = seed;

  try {
    if (*rep) {
      const ReplayReport r = replay_manifest(manifest_path, opt);
      for (const auto& f : r.missing) std::cerr << "replay: missing " << f << "\n";
      for (const auto& f : r.mismatched) std::cerr << "replay: differs " << f << "\n";
      if (!quiet) std::cout << (r.ok() ? "replay: all outputs identical\n" : "replay: outputs differ\n");
      return r.ok() ? ok : replay_mismatch;
    }
    const ExperimentConfig cfg = load_config(config_path);
    if (*run) {
      if (cfg.diagnose) throw ConfigError(cfg.origin, 0, 0, "this is a diagnose config; use 'wlsm diagnose'");
      run_experiment(cfg, opt);
    } else {
      if (!cfg.diagnose) throw ConfigError(cfg.origin, 0, 0, "this is a run config; use 'wlsm run'");
      run_diagnose(cfg, opt);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const wlsm::NumericError& e) {
    std::cerr << "numeric error: " << e.what();
    if (e.condition() > 0.0) std::cerr << " (condition " << e.condition() << ")";
    std::cerr << "\n";
    return numeric_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numeric_error;
  }
  return ok;
}
