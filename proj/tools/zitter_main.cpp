#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zitter/experiment.hpp"

namespace {

const char* experiment_blurb(const std::string& name) {
  if (name == "diffusion-recovery")
    return "recover the diffusion coefficient from a drift-free ensemble";
  if (name == "density-match")
    return "sample the harmonic ground state with its osmotic drift";
  if (name == "fp-evolve") return "free Gaussian spreading under the forward equation";
  if (name == "stationarity-audit")
    return "stationarity residual and ground energies of reference systems";
  if (name == "mass-audit") return "replay a transition log against the mass invariant";
  if (name == "em-budget") return "closed-form electromagnetic energy budget";
  return "spin drift and Clifford identity fuzz checks";
}

int run_experiment(const std::string& name, const std::string& configPath,
                   const std::string& outDir, int threads) {
  namespace ex = zitter::experiment;
  ex::Config cfg = ex::load_config(configPath);
  if (cfg.experiment != name)
    throw std::runtime_error("config names experiment `" + cfg.experiment +
                             "` but `" + name + "` was requested");
  if (!outDir.empty()) cfg.outRoot = outDir;
  else if (const char* env = std::getenv("ZITTER_OUT")) cfg.outRoot = env;
  if (threads > 0) cfg.threads = threads;
  else if (const char* env = std::getenv("ZITTER_THREADS"))
    cfg.threads = std::max(1, std::atoi(env));

  const auto t0 = std::chrono::steady_clock::now();
  const ex::RunResult res = ex::run(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string dir = ex::write_run(cfg, res, wall);

  std::cout << res.results.dump(2) << "\n";
  for (const auto& c : res.checks) {
    std::cerr << (c.pass ? "pass" : "FAIL") << "  " << c.name << "  value "
              << c.value << "  threshold " << c.threshold << "\n";
  }
  std::cerr << "wrote " << dir << "\n";
  return res.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"configuration-driven experiment runner"};
  app.require_subcommand(1);

  std::string configPath, outDir;
  int threads = 0;
  for (const auto& name : zitter::experiment::known_experiments()) {
    auto* sub = app.add_subcommand(name, experiment_blurb(name));
    sub->add_option("--config", configPath, "config file (JSON)")->required();
    sub->add_option("--threads", threads, "worker thread cap");
    sub->add_option("--out", outDir, "output root directory");
  }
  auto* validate = app.add_subcommand("validate", "schema-check a config without running");
  validate->add_option("--config", configPath, "config file (JSON)")->required();

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().at(0)->get_name();

  try {
    if (sub == "validate") {
      const auto diag = zitter::experiment::validate_config_file(configPath);
      for (const auto& m : diag) std::cout << m << "\n";
      return diag.empty() ? 0 : 2;
    }
    return run_experiment(sub, configPath, outDir, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
