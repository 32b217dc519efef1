#pragma once
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace zitter::experiment {

// One invariant verdict; `pass` is value <= threshold unless noted otherwise
// by the producing experiment.
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Config {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string unitPreset = "SI";  // SI | natural
  nlohmann::json params = nlohmann::json::object();
  std::string outRoot = "runs";
  int threads = 0;  // 0 = hardware concurrency
};

struct RunResult {
  nlohmann::json results;     // results.json payload
  std::string csv;            // results.csv payload
  std::vector<Check> checks;  // invariants.json payload
  bool ok() const;
};

const std::vector<std::string>& known_experiments();

// Schema diagnostics (missing keys, unknown keys, type errors), one message
// per problem, without running anything. Empty means well-formed.
std::vector<std::string> validate_config(const nlohmann::json& j);
std::vector<std::string> validate_config_file(const std::string& path);

// Throws std::runtime_error carrying the joined diagnostics.
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::string& path);

RunResult run(const Config& cfg);

std::uint64_t fnv1a64(std::string_view s);

// <outRoot>/<experiment>-<hex64 of the semantic config (experiment, seed,
// unitPreset, params)>. Output root and thread cap do not enter the hash.
std::string run_dir_name(const Config& cfg);

nlohmann::json invariants_json(const std::vector<Check>& checks);

// Writes results.json, invariants.json, results.csv and manifest.json under
// run_dir_name(cfg); returns the directory. Wall time and the timestamp go
// only into the manifest, so result files are byte-stable across reruns.
std::string write_run(const Config& cfg, const RunResult& r, double wallSeconds);

}  // namespace zitter::experiment
