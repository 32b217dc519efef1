#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "testutil.hpp"
#include "zitter/experiment.hpp"

namespace ex = zitter::experiment;
using nlohmann::json;

namespace {

bool has_diag(const std::vector<std::string>& d, const std::string& msg) {
  return std::find(d.begin(), d.end(), msg) != d.end();
}

int run_cli(const std::string& args, const std::string& out,
            const std::string& err, const std::string& envPrefix = "") {
  const std::string cmd = envPrefix + "\"" + ZITTER_CLI_BIN + "\" " + args +
                          " > " + out + " 2> " + err;
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("config validation reports every problem") {
  SUBCASE("root must be an object") {
    const auto d = ex::validate_config(json::array({1, 2}));
    REQUIRE(d.size() == 1);
    CHECK(d[0] == "config root must be an object");
  }
  SUBCASE("missing keys") {
    const auto d = ex::validate_config(json::object());
    REQUIRE(d.size() == 2);
    CHECK(has_diag(d, "missing key `experiment`"));
    CHECK(has_diag(d, "missing key `seed`"));
  }
  SUBCASE("one message per defect") {
    const json j{{"experiment", "nope"}, {"seed", -3},      {"unitPreset", "weird"},
                 {"out", 5},             {"extra", true},   {"params", json::object()}};
    const auto d = ex::validate_config(j);
    CHECK(d.size() == 5);
    CHECK(has_diag(d, "unknown key `extra`"));
    CHECK(has_diag(d,
                   "`experiment` must be one of: diffusion-recovery, "
                   "density-match, fp-evolve, stationarity-audit, mass-audit, "
                   "em-budget, spin-checks"));
    CHECK(has_diag(d, "`seed` must be a non-negative integer"));
    CHECK(has_diag(d, "`unitPreset` must be \"SI\" or \"natural\""));
    CHECK(has_diag(d, "`out` must be a string"));
  }
  SUBCASE("experiment and seed types") {
    auto d = ex::validate_config(json{{"experiment", 7}, {"seed", 0}});
    CHECK(has_diag(d, "`experiment` must be a string"));
    d = ex::validate_config(json{{"experiment", "em-budget"}, {"seed", 3.5}});
    CHECK(has_diag(d, "`seed` must be a non-negative integer"));
  }
  SUBCASE("parameters are checked against the experiment") {
    auto d = ex::validate_config(json{{"experiment", "em-budget"},
                                      {"seed", 1},
                                      {"params", {{"paths", 3}}}});
    REQUIRE(d.size() == 1);
    CHECK(d[0] == "unknown parameter `params.paths` for em-budget");

    d = ex::validate_config(json{{"experiment", "em-budget"},
                                 {"seed", 1},
                                 {"params", {{"order", 2.5}}}});
    REQUIRE(d.size() == 1);
    CHECK(d[0] == "`params.order` must be an integer");

    d = ex::validate_config(json{{"experiment", "fp-evolve"},
                                 {"seed", 1},
                                 {"params", {{"upwind", 1}}}});
    REQUIRE(d.size() == 1);
    CHECK(d[0] == "`params.upwind` must be a boolean");

    d = ex::validate_config(
        json{{"experiment", "em-budget"}, {"seed", 1}, {"params", json::array()}});
    REQUIRE(d.size() == 1);
    CHECK(d[0] == "`params` must be an object");
  }
  SUBCASE("a well-formed config is silent") {
    const json j{{"experiment", "em-budget"},
                 {"seed", 42},
                 {"unitPreset", "natural"},
                 {"out", "elsewhere"},
                 {"params", {{"dv", 1.0e7}, {"order", 3}}}};
    CHECK(ex::validate_config(j).empty());
  }
}

TEST_CASE("config objects from json") {
  const json j{{"experiment", "em-budget"},
               {"seed", 42},
               {"params", {{"order", 3}}},
               {"out", "elsewhere"}};
  const ex::Config cfg = ex::config_from_json(j);
  CHECK(cfg.experiment == "em-budget");
  CHECK(cfg.seed == 42);
  CHECK(cfg.unitPreset == "SI");
  CHECK(cfg.outRoot == "elsewhere");
  CHECK(cfg.params == json{{"order", 3}});
  CHECK(cfg.threads == 0);

  const ex::Config bare =
      ex::config_from_json(json{{"experiment", "spin-checks"}, {"seed", 0}});
  CHECK(bare.outRoot == "runs");
  CHECK(bare.params == json::object());

  CHECK_THROWS_WITH_AS(ex::config_from_json(json{{"experiment", "em-budget"}}),
                       "invalid config:\n  missing key `seed`",
                       std::runtime_error);
}

TEST_CASE("config files load with diagnostics") {
  const std::string dir = testutil::temp_dir("expcfg");
  const std::string good = dir + "/good.json";
  testutil::write_text(good, R"({"experiment": "em-budget", "seed": 1})");
  CHECK(ex::validate_config_file(good).empty());
  CHECK(ex::load_config(good).experiment == "em-budget");

  const std::string broken = dir + "/broken.json";
  testutil::write_text(broken, "{not json");
  CHECK_FALSE(ex::validate_config_file(broken).empty());

  const auto missing = ex::validate_config_file(dir + "/none.json");
  REQUIRE(missing.size() == 1);
  CHECK(missing[0] == "cannot open " + dir + "/none.json");
  CHECK_THROWS_AS(ex::load_config(dir + "/none.json"), std::runtime_error);
}

TEST_CASE("hash and run directory naming") {
  CHECK(ex::fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(ex::fnv1a64("a") == 0xaf63dc4c8601ec8cull);

  ex::Config cfg;
  cfg.experiment = "em-budget";
  cfg.seed = 7;
  const std::string name = ex::run_dir_name(cfg);
  REQUIRE(name.rfind("runs/em-budget-", 0) == 0);
  CHECK(name.size() == std::string("runs/em-budget-").size() + 16);

  ex::Config moved = cfg;
  moved.outRoot = "elsewhere";
  moved.threads = 8;
  const std::string movedName = ex::run_dir_name(moved);
  CHECK(movedName.rfind("elsewhere/", 0) == 0);
  CHECK(movedName.substr(movedName.find('/')) == name.substr(name.find('/')));

  ex::Config reseeded = cfg;
  reseeded.seed = 8;
  CHECK(ex::run_dir_name(reseeded) != name);

  ex::Config tweaked = cfg;
  tweaked.params["order"] = 5;
  CHECK(ex::run_dir_name(tweaked) != name);
}

TEST_CASE("experiment registry") {
  const auto& names = ex::known_experiments();
  CHECK(names.size() == 7);
  for (const char* n : {"diffusion-recovery", "density-match", "fp-evolve",
                        "stationarity-audit", "mass-audit", "em-budget",
                        "spin-checks"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }

  ex::Config cfg;
  cfg.experiment = "bogus";
  CHECK_THROWS_WITH_AS(ex::run(cfg), "unknown experiment bogus",
                       std::runtime_error);
}

TEST_CASE("electromagnetic budget run") {
  ex::Config cfg;
  cfg.experiment = "em-budget";
  cfg.seed = 3;
  const ex::RunResult r = ex::run(cfg);
  CHECK(r.ok());
  REQUIRE(r.checks.size() == 5);
  CHECK(r.checks[0].name == "magnetic_mass_sigfigs");
  CHECK(r.checks[1].name == "energy_split_sum");
  CHECK(r.checks[2].name == "radiated_equals_series_term");
  CHECK(r.checks[3].name == "larmor_prefactor");
  CHECK(r.checks[4].name == "interaction_split");

  CHECK(r.results.at("magneticMass").get<double>() / 9.1095243988e-31 ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.results.at("experiment") == "em-budget");
  CHECK(r.results.at("seed") == 3);
  CHECK(r.results.at("seriesTerms").size() == 4);
  CHECK(r.csv.rfind("metric,value\n", 0) == 0);
}

TEST_CASE("mass audit run from inline transitions") {
  ex::Config cfg;
  cfg.experiment = "mass-audit";
  cfg.seed = 0;
  cfg.unitPreset = "natural";
  cfg.params = {{"initial",
                 {{"energy", 10.0},
                  {"v1", 1.0},
                  {"v2", 0.5},
                  {"ek", 0.2},
                  {"radius", 1.0},
                  {"nuRot", 1.0},
                  {"mass", 2.0}}},
                {"transitions",
                 json::array({{{"deltaE", 0.1}},
                              {{"deltaE", -0.05}, {"jitter", 1.0e-6}}})}};
  const ex::RunResult r = ex::run(cfg);
  CHECK(r.ok());
  CHECK(r.results.at("events") == 2);
  CHECK(r.results.at("maxMassDrift").get<double>() == 0.0);
  CHECK(r.results.at("finalMass").get<double>() == 2.0);
  CHECK(r.results.at("finalEnergy").get<double>() == 10.0);
  const double eNet = 10.0 - (1.0 - 0.5 - 0.2) + 0.1 + (-0.05 + 1.0e-6);
  CHECK(r.results.at("finalNuVib").get<double>() ==
        doctest::Approx(eNet / (4.0 * zitter::kPi * 2.0)).epsilon(1e-12));
}

TEST_CASE("spin check run") {
  ex::Config cfg;
  cfg.experiment = "spin-checks";
  cfg.seed = 11;
  cfg.unitPreset = "natural";
  cfg.params = {{"cases", 100}, {"gridN", 8}, {"densities", 2}};
  const ex::RunResult r = ex::run(cfg);
  CHECK(r.ok());
  REQUIRE(r.checks.size() == 3);
  CHECK(r.checks[0].name == "clifford_identity");
  CHECK(r.checks[1].name == "drift_antisymmetry");
  CHECK(r.checks[2].name == "drift_orthogonality");
  CHECK(r.results.at("cliffordMaxResidual").get<double>() <= 1.0e-12);
}

TEST_CASE("diffusion recovery is reproducible across thread counts") {
  ex::Config cfg;
  cfg.experiment = "diffusion-recovery";
  cfg.seed = 9;
  cfg.unitPreset = "natural";
  cfg.params = {{"paths", 1500}, {"steps", 200},        {"dt", 1.0e-3},
                {"dim", 1},      {"recordStride", 20},  {"tolerance", 0.15}};
  cfg.threads = 1;
  const ex::RunResult one = ex::run(cfg);
  cfg.threads = 2;
  const ex::RunResult two = ex::run(cfg);

  CHECK(one.ok());
  CHECK(one.results.at("betaTarget").get<double>() == 0.5);
  CHECK(std::abs(one.results.at("betaHat").get<double>() - 0.5) / 0.5 < 0.15);
  CHECK(one.csv.rfind("t,msd\n", 0) == 0);

  CHECK(one.results == two.results);
  CHECK(one.results.dump(2) == two.results.dump(2));
  CHECK(one.csv == two.csv);
}

TEST_CASE("free spreading run matches the variance law") {
  ex::Config cfg;
  cfg.experiment = "fp-evolve";
  cfg.seed = 1;
  cfg.unitPreset = "natural";
  cfg.params = {{"gridN", 64}, {"tFinal", 0.5}};
  const ex::RunResult r = ex::run(cfg);
  CHECK(r.ok());
  REQUIRE(r.checks.size() == 2);
  CHECK(r.checks[0].name == "variance_law");
  CHECK(r.checks[1].name == "mass_conservation");
  CHECK(r.results.at("beta").get<double>() == 0.5);
  CHECK(r.csv.rfind("t,mass,variance,varianceLaw,clipped\n", 0) == 0);
}

TEST_CASE("run directories hold byte-stable artifacts") {
  const std::string rootA = testutil::temp_dir("runsA");
  const std::string rootB = testutil::temp_dir("runsB");

  ex::Config a;
  a.experiment = "em-budget";
  a.seed = 5;
  a.outRoot = rootA;
  ex::Config b = a;
  b.outRoot = rootB;
  b.threads = 3;

  const ex::RunResult ra = ex::run(a);
  const ex::RunResult rb = ex::run(b);
  const std::string dirA = ex::write_run(a, ra, 0.5);
  const std::string dirB = ex::write_run(b, rb, 99.0);
  CHECK(dirA == ex::run_dir_name(a));

  for (const char* f : {"results.json", "invariants.json", "results.csv"}) {
    CAPTURE(f);
    CHECK(testutil::read_text(dirA + "/" + f) ==
          testutil::read_text(dirB + "/" + f));
  }
  const json results = json::parse(testutil::read_text(dirA + "/results.json"));
  CHECK(results == ra.results);
  const json inv = json::parse(testutil::read_text(dirA + "/invariants.json"));
  CHECK(inv.at("ok") == true);
  CHECK(inv.at("checks").size() == ra.checks.size());
  CHECK(inv.at("checks")[0].at("name") == ra.checks[0].name);
  const json man = json::parse(testutil::read_text(dirA + "/manifest.json"));
  CHECK(man.at("experiment") == "em-budget");
  CHECK(man.at("ok") == true);
  CHECK(man.contains("version"));
  CHECK(man.contains("timestamp"));
  CHECK(man.at("threads").get<int>() >= 1);
}

TEST_CASE("invariant summaries") {
  ex::Check c;
  c.name = "sample";
  c.value = 2.0;
  c.threshold = 1.0;
  c.pass = false;
  const json j = ex::invariants_json({c});
  CHECK(j.at("ok") == false);
  CHECK(j.at("checks")[0].at("name") == "sample");
  CHECK(j.at("checks")[0].at("value") == 2.0);
  CHECK(j.at("checks")[0].at("pass") == false);
}

TEST_CASE("command line runner") {
  const std::string dir = testutil::temp_dir("cli");
  const std::string out = dir + "/out.txt";
  const std::string err = dir + "/err.txt";
  const json cfgJson{{"experiment", "em-budget"}, {"seed", 2}, {"out", dir + "/runs"}};
  const std::string cfgPath = dir + "/budget.json";
  testutil::write_text(cfgPath, cfgJson.dump());

  SUBCASE("a run prints results and writes the run directory") {
    const int rc = run_cli("em-budget --config " + cfgPath, out, err);
    CHECK(rc == 0);
    const std::string stdoutText = testutil::read_text(out);
    CHECK(stdoutText.find("\"magneticMass\"") != std::string::npos);
    CHECK(testutil::read_text(err).find("pass  magnetic_mass_sigfigs") !=
          std::string::npos);

    ex::Config cfg = ex::config_from_json(cfgJson);
    CHECK(std::filesystem::exists(ex::run_dir_name(cfg) + "/results.json"));
  }
  SUBCASE("the out flag and environment override the config") {
    const int rc = run_cli(
        "em-budget --config " + cfgPath + " --out " + dir + "/flag", out, err,
        "ZITTER_OUT=" + dir + "/env ");
    CHECK(rc == 0);
    ex::Config cfg = ex::config_from_json(cfgJson);
    cfg.outRoot = dir + "/flag";
    CHECK(std::filesystem::exists(ex::run_dir_name(cfg) + "/results.json"));
    CHECK_FALSE(std::filesystem::exists(dir + "/env"));

    const int rc2 = run_cli("em-budget --config " + cfgPath, out, err,
                            "ZITTER_OUT=" + dir + "/env ");
    CHECK(rc2 == 0);
    cfg.outRoot = dir + "/env";
    CHECK(std::filesystem::exists(ex::run_dir_name(cfg) + "/results.json"));
  }
  SUBCASE("subcommand and config experiment must agree") {
    const int rc = run_cli("mass-audit --config " + cfgPath, out, err);
    CHECK(rc == 2);
    CHECK(testutil::read_text(err).find(
              "config names experiment `em-budget` but `mass-audit` was "
              "requested") != std::string::npos);
  }
  SUBCASE("validate accepts and rejects") {
    CHECK(run_cli("validate --config " + cfgPath, out, err) == 0);
    CHECK(testutil::read_text(out).empty());

    const std::string badPath = dir + "/bad.json";
    testutil::write_text(badPath, R"({"experiment": "em-budget"})");
    CHECK(run_cli("validate --config " + badPath, out, err) == 2);
    CHECK(testutil::read_text(out).find("missing key `seed`") !=
          std::string::npos);
  }
  SUBCASE("a missing config file is an error") {
    CHECK(run_cli("em-budget --config " + dir + "/none.json", out, err) == 2);
    CHECK(testutil::read_text(err).rfind("error: cannot open", 0) == 0);
  }
}
