#include "zitter/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "zitter/constants.hpp"
#include "zitter/electrodynamics.hpp"
#include "zitter/fields.hpp"
#include "zitter/fokker_planck.hpp"
#include "zitter/io.hpp"
#include "zitter/langevin.hpp"
#include "zitter/mass_ledger.hpp"
#include "zitter/rng.hpp"
#include "zitter/schrodinger.hpp"

namespace zitter::experiment {

using nlohmann::json;

namespace {

enum class PT { Number, Integer, Boolean, String, Array, Object };

struct ParamSpec {
  const char* name;
  PT type;
};

const std::map<std::string, std::vector<ParamSpec>>& param_table() {
  static const std::map<std::string, std::vector<ParamSpec>> t{
      {"diffusion-recovery",
       {{"paths", PT::Integer},
        {"steps", PT::Integer},
        {"dt", PT::Number},
        {"dim", PT::Integer},
        {"recordStride", PT::Integer},
        {"beta", PT::Number},
        {"tolerance", PT::Number}}},
      {"density-match",
       {{"paths", PT::Integer},
        {"steps", PT::Integer},
        {"dt", PT::Number},
        {"gridN", PT::Integer},
        {"halfWidth", PT::Number},
        {"bins", PT::Integer},
        {"binHalfWidth", PT::Number},
        {"omega", PT::Number},
        {"tolerance", PT::Number}}},
      {"fp-evolve",
       {{"gridN", PT::Integer},
        {"halfWidth", PT::Number},
        {"sigma0", PT::Number},
        {"tFinal", PT::Number},
        {"safety", PT::Number},
        {"upwind", PT::Boolean},
        {"beta", PT::Number},
        {"recordEvery", PT::Integer},
        {"tolerance", PT::Number}}},
      {"stationarity-audit",
       {{"harmonicN", PT::Integer},
        {"harmonicHalfWidth", PT::Number},
        {"omega", PT::Number},
        {"hydrogenN", PT::Integer},
        {"hydrogenRmax", PT::Number},
        {"bohrRadius", PT::Number},
        {"solveTol", PT::Number},
        {"residualTol", PT::Number},
        {"harmonicEnergyTol", PT::Number},
        {"hydrogenEnergyTol", PT::Number}}},
      {"mass-audit",
       {{"logFile", PT::String},
        {"transitions", PT::Array},
        {"initial", PT::Object},
        {"driftTol", PT::Number},
        {"residualTol", PT::Number}}},
      {"em-budget",
       {{"dv", PT::Number},
        {"charge", PT::Number},
        {"rMin", PT::Number},
        {"order", PT::Integer}}},
      {"spin-checks",
       {{"cases", PT::Integer},
        {"gridN", PT::Integer},
        {"densities", PT::Integer},
        {"tolerance", PT::Number}}}};
  return t;
}

bool type_ok(const json& v, PT t) {
  switch (t) {
    case PT::Number: return v.is_number();
    case PT::Integer: return v.is_number_integer() || v.is_number_unsigned();
    case PT::Boolean: return v.is_boolean();
    case PT::String: return v.is_string();
    case PT::Array: return v.is_array();
    case PT::Object: return v.is_object();
  }
  return false;
}

const char* type_name(PT t) {
  switch (t) {
    case PT::Number: return "a number";
    case PT::Integer: return "an integer";
    case PT::Boolean: return "a boolean";
    case PT::String: return "a string";
    case PT::Array: return "an array";
    case PT::Object: return "an object";
  }
  return "?";
}

std::string experiment_list() {
  std::string s;
  for (const auto& e : known_experiments()) {
    if (!s.empty()) s += ", ";
    s += e;
  }
  return s;
}

double p_num(const json& p, const char* key, double def) {
  return p.contains(key) ? p.at(key).get<double>() : def;
}
int p_int(const json& p, const char* key, int def) {
  return p.contains(key) ? p.at(key).get<int>() : def;
}
bool p_bool(const json& p, const char* key, bool def) {
  return p.contains(key) ? p.at(key).get<bool>() : def;
}

PhysicalConstants preset(const std::string& name) {
  if (name == "natural") return PhysicalConstants::natural();
  return PhysicalConstants::si();
}

int threads_for(const Config& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

Check make_check(std::string name, double value, double threshold) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.threshold = threshold;
  c.pass = value <= threshold;
  return c;
}

void csv_row(std::string& csv, std::initializer_list<double> vals) {
  bool first = true;
  for (double v : vals) {
    if (!first) csv += ',';
    csv += io::fmt(v);
    first = false;
  }
  csv += '\n';
}

// Mean and central second moment of a 1-D density under the grid weights.
std::pair<double, double> moments(const ScalarField& rho) {
  const Grid& g = rho.grid();
  double mass = 0.0, m1 = 0.0;
  for (std::size_t n = 0; n < rho.size(); ++n) {
    const double w = rho[n] * g.weight(n);
    mass += w;
    m1 += w * g.coord(0, static_cast<int>(n));
  }
  const double mean = m1 / mass;
  double m2 = 0.0;
  for (std::size_t n = 0; n < rho.size(); ++n) {
    const double x = g.coord(0, static_cast<int>(n)) - mean;
    m2 += rho[n] * g.weight(n) * x * x;
  }
  return {mean, m2 / mass};
}

// Integral of the piecewise-linear interpolant of nodal values over [a, b],
// zero outside the node range.
double integrate_linear(const ScalarField& f, double a, double b) {
  const Grid& g = f.grid();
  const int n = g.extent(0);
  const double h = g.spacing(0);
  const double lo = std::max(a, g.coord(0, 0));
  const double hi = std::min(b, g.coord(0, n - 1));
  if (hi <= lo) return 0.0;
  int i0 = static_cast<int>(std::floor((lo - g.origin(0)) / h));
  int i1 = static_cast<int>(std::ceil((hi - g.origin(0)) / h));
  i0 = std::clamp(i0, 0, n - 2);
  i1 = std::clamp(i1, 1, n - 1);
  double total = 0.0;
  for (int i = i0; i < i1; ++i) {
    const double xl = std::max(lo, g.coord(0, i));
    const double xr = std::min(hi, g.coord(0, i + 1));
    if (xr <= xl) continue;
    const double tl = (xl - g.coord(0, i)) / h;
    const double tr = (xr - g.coord(0, i)) / h;
    const double fl = f[i] * (1.0 - tl) + f[i + 1] * tl;
    const double fr = f[i] * (1.0 - tr) + f[i + 1] * tr;
    total += 0.5 * (fl + fr) * (xr - xl);
  }
  return total;
}

double weighted_rms(const ScalarField& res, const ScalarField& rho) {
  const Grid& g = res.grid();
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < res.size(); ++n) {
    const double w = rho[n] * g.weight(n);
    num += w * res[n] * res[n];
    den += w;
  }
  return std::sqrt(num / den);
}

RunResult run_diffusion(const Config& cfg) {
  const json& p = cfg.params;
  const PhysicalConstants pc = preset(cfg.unitPreset);
  langevin::StepperConfig sc;
  sc.dt = p_num(p, "dt", 1.0e-6);
  sc.nSteps = p_int(p, "steps", 1000);
  sc.nPaths = p_int(p, "paths", 100000);
  sc.seed = cfg.seed;
  sc.beta = p_num(p, "beta", pc.beta());
  sc.dim = p_int(p, "dim", 3);
  sc.recordStride = p_int(p, "recordStride", 10);
  sc.threads = threads_for(cfg);
  sc.validate();

  const auto ens = langevin::simulate_ensemble(sc, {});
  const auto fit = langevin::msd_and_diffusion(ens);
  const double tol = p_num(p, "tolerance", 0.05);
  const double rel = std::abs(fit.betaHat - sc.beta) / sc.beta;

  RunResult r;
  r.results = {{"betaTarget", sc.beta},
               {"betaHat", fit.betaHat},
               {"relativeError", rel},
               {"slope", fit.slope},
               {"intercept", fit.intercept},
               {"rSquared", fit.rsq},
               {"paths", sc.nPaths},
               {"steps", sc.nSteps},
               {"dt", sc.dt},
               {"dim", sc.dim}};
  r.csv = "t,msd\n";
  for (std::size_t i = 0; i < fit.t.size(); ++i)
    csv_row(r.csv, {fit.t[i], fit.msd[i]});
  r.checks.push_back(make_check("beta_relative_error", rel, tol));
  r.checks.push_back(make_check("msd_fit_linearity", 1.0 - fit.rsq, 0.01));
  return r;
}

RunResult run_density(const Config& cfg) {
  const json& p = cfg.params;
  const PhysicalConstants pc = preset(cfg.unitPreset);
  const int gridN = p_int(p, "gridN", 257);
  const double omega = p_num(p, "omega", 1.0);
  const double ell = std::sqrt(pc.hbar / (pc.mass * omega));
  const double hw = p_num(p, "halfWidth", 6.4) * ell;
  const double h = 2.0 * hw / (gridN - 1);
  Grid g({gridN}, {h}, {-hw}, Boundary::DirichletZero);

  ScalarField V(g);
  for (int i = 0; i < gridN; ++i) {
    const double x = g.coord(0, i);
    V[i] = 0.5 * pc.mass * omega * omega * x * x;
  }
  schrod::HamiltonianSpec spec;
  spec.potential = V;
  spec.mass = pc.mass;
  spec.hbar = pc.hbar;
  const auto sol = schrod::solve_stationary(spec, 1);
  const ScalarField rho = fields::density_from_wavefunction(sol.states[0]);
  const VectorField u = fields::osmotic_velocity(rho, pc.beta());

  langevin::StepperConfig sc;
  sc.dt = p_num(p, "dt", 1.0e-3);
  sc.nSteps = p_int(p, "steps", 6000);
  sc.nPaths = p_int(p, "paths", 100000);
  sc.seed = cfg.seed;
  sc.beta = pc.beta();
  sc.dim = 1;
  sc.recordStride = sc.nSteps;
  sc.threads = threads_for(cfg);
  sc.validate();
  const auto ens = langevin::simulate_ensemble(sc, langevin::grid_drift(u));

  const int bins = p_int(p, "bins", 48);
  const double bhw = p_num(p, "binHalfWidth", 4.0) * ell;
  const double bw = 2.0 * bhw / bins;
  std::vector<double> counts(bins, 0.0);
  int escaped = 0;
  for (int path = 0; path < ens.nPaths; ++path) {
    const double x = ens.pos(path, ens.nSnapshots - 1, 0);
    const int b = static_cast<int>(std::floor((x + bhw) / bw));
    if (b >= 0 && b < bins) counts[b] += 1.0;
    else ++escaped;
  }
  const double nIn = static_cast<double>(ens.nPaths - escaped);
  require(nIn > 0.0, "density-match: no samples inside the histogram window");

  std::vector<double> target(bins, 0.0);
  double targetTotal = 0.0;
  for (int b = 0; b < bins; ++b) {
    target[b] = integrate_linear(rho, -bhw + b * bw, -bhw + (b + 1) * bw);
    targetTotal += target[b];
  }
  double tv = 0.0;
  for (int b = 0; b < bins; ++b)
    tv += std::abs(counts[b] / nIn - target[b] / targetTotal);
  tv *= 0.5;

  const double tol = p_num(p, "tolerance", 0.02);
  RunResult r;
  r.results = {{"totalVariation", tv},
               {"groundEnergy", sol.energies[0]},
               {"paths", sc.nPaths},
               {"steps", sc.nSteps},
               {"dt", sc.dt},
               {"bins", bins},
               {"escaped", escaped}};
  r.csv = "binCenter,sampled,target\n";
  for (int b = 0; b < bins; ++b)
    csv_row(r.csv, {-bhw + (b + 0.5) * bw, counts[b] / nIn,
                    target[b] / targetTotal});
  r.checks.push_back(make_check("total_variation", tv, tol));
  return r;
}

RunResult run_fp(const Config& cfg) {
  const json& p = cfg.params;
  const PhysicalConstants pc = preset(cfg.unitPreset);
  const int n = p_int(p, "gridN", 256);
  const double hw = p_num(p, "halfWidth", 8.0);
  const double h = 2.0 * hw / n;
  Grid g({n}, {h}, {-hw}, Boundary::Periodic);

  const double sigma0 = p_num(p, "sigma0", 1.0);
  const double beta = p_num(p, "beta", pc.beta());
  ScalarField rho0(g);
  for (int i = 0; i < n; ++i) {
    const double x = g.coord(0, i);
    rho0[i] = std::exp(-x * x / (2.0 * sigma0 * sigma0));
  }
  const double mass0 = integrate(rho0);
  for (auto& v : rho0.values()) v /= mass0;

  fp::State s{rho0, VectorField(g), beta, 0.0};
  const double tFinal = p_num(p, "tFinal", 1.0);
  const double safety = p_num(p, "safety", 0.9);
  const bool upwind = p_bool(p, "upwind", false);
  const double dt0 = safety * fp::stable_dt(s);
  const int steps = static_cast<int>(std::ceil(tFinal / dt0));
  const double dt = tFinal / steps;
  const int recordEvery = p_int(p, "recordEvery", std::max(1, steps / 64));

  RunResult r;
  r.csv = "t,mass,variance,varianceLaw,clipped\n";
  double maxMassDrift = 0.0;
  long clippedTotal = 0;
  const auto emit = [&](const fp::State& st) {
    const auto [mean, var] = moments(st.rho);
    (void)mean;
    csv_row(r.csv, {st.t, integrate(st.rho), var,
                    sigma0 * sigma0 + 2.0 * beta * st.t,
                    static_cast<double>(clippedTotal)});
  };
  emit(s);
  for (int k = 1; k <= steps; ++k) {
    fp::StepDiagnostics diag;
    s = fp::forward_step(s, dt, upwind, &diag);
    clippedTotal += diag.clippedNodes;
    maxMassDrift = std::max(maxMassDrift, std::abs(diag.massAfter - 1.0));
    if (k % recordEvery == 0 || k == steps) emit(s);
  }
  const auto [mean, var] = moments(s.rho);
  (void)mean;
  const double law = sigma0 * sigma0 + 2.0 * beta * tFinal;
  const double relDev = std::abs(var - law) / law;
  const double tol = p_num(p, "tolerance", 0.01);

  r.results = {{"varianceFinal", var},
               {"varianceLaw", law},
               {"relativeDeviation", relDev},
               {"massDrift", maxMassDrift},
               {"clippedNodes", clippedTotal},
               {"steps", steps},
               {"dt", dt},
               {"beta", beta}};
  r.checks.push_back(make_check("variance_law", relDev, tol));
  r.checks.push_back(make_check("mass_conservation", maxMassDrift, 1.0e-10));
  return r;
}

struct AuditRow {
  double wrms = 0.0;
  double maxAbs = 0.0;
  double energy = 0.0;
  double energyExact = 0.0;
  double energyRel = 0.0;
};

// The closed-form osmotic field must sit at the solved energy: the residual
// couples the eigensolve to the discrete stationarity identity.
AuditRow audit_state(const schrod::HamiltonianSpec& spec, double solveTol,
                     double energyExact, const VectorField& osmotic,
                     const ScalarField& rho) {
  const auto sol = schrod::solve_stationary(spec, 1, solveTol);
  const ScalarField res = fp::stationarity_residual(
      osmotic, spec.potential, sol.energies[0], spec.mass, spec.hbar);
  AuditRow row;
  row.wrms = weighted_rms(res, rho);
  row.maxAbs = res.max_abs();
  row.energy = sol.energies[0];
  row.energyExact = energyExact;
  row.energyRel = std::abs(row.energy - energyExact) / std::abs(energyExact);
  return row;
}

RunResult run_stationarity(const Config& cfg) {
  const json& p = cfg.params;
  const PhysicalConstants pc = preset(cfg.unitPreset);
  const double solveTol = p_num(p, "solveTol", 1.0e-12);
  const double residualTol = p_num(p, "residualTol", 1.0e-6);

  const double omega = p_num(p, "omega", 1.0);
  const double ell = std::sqrt(pc.hbar / (pc.mass * omega));
  const int hn = p_int(p, "harmonicN", 20001);
  const double hhw = p_num(p, "harmonicHalfWidth", 5.0) * ell;
  const double hh = 2.0 * hhw / (hn - 1);
  Grid hg({hn}, {hh}, {-hhw}, Boundary::DirichletZero);
  schrod::HamiltonianSpec harm;
  harm.potential = ScalarField(hg);
  VectorField harmU(hg);
  ScalarField harmRho(hg);
  for (int i = 0; i < hn; ++i) {
    const double x = hg.coord(0, i);
    harm.potential[i] = 0.5 * pc.mass * omega * omega * x * x;
    harmU.comp(i, 0) = -omega * x;
    harmRho[i] = std::exp(-pc.mass * omega * x * x / pc.hbar);
  }
  harm.mass = pc.mass;
  harm.hbar = pc.hbar;
  const AuditRow harmRow =
      audit_state(harm, solveTol, 0.5 * pc.hbar * omega, harmU, harmRho);

  const double a0 = p_num(p, "bohrRadius", 1.0);
  const int yn = p_int(p, "hydrogenN", 24000);
  const double rmax = p_num(p, "hydrogenRmax", 12.0) * a0;
  const double yh = rmax / yn;
  Grid yg({yn}, {yh}, {yh}, Boundary::DirichletZero, Geometry::RadialSpherical);
  schrod::HamiltonianSpec hyd;
  hyd.potential = ScalarField(yg);
  VectorField hydU(yg);
  ScalarField hydRho(yg);
  const double coulomb = pc.hbar * pc.hbar / (pc.mass * a0);
  for (int i = 0; i < yn; ++i) {
    const double r = yg.coord(0, i);
    hyd.potential[i] = -coulomb / r;
    hydU.comp(i, 0) = -pc.hbar / (pc.mass * a0);
    hydRho[i] = std::exp(-2.0 * r / a0);
  }
  hyd.mass = pc.mass;
  hyd.hbar = pc.hbar;
  const AuditRow hydRow =
      audit_state(hyd, solveTol, -pc.hbar * pc.hbar / (2.0 * pc.mass * a0 * a0),
                  hydU, hydRho);

  RunResult r;
  r.results = {{"harmonic",
                {{"residualWrms", harmRow.wrms},
                 {"residualMax", harmRow.maxAbs},
                 {"energy", harmRow.energy},
                 {"energyExact", harmRow.energyExact},
                 {"energyRelError", harmRow.energyRel},
                 {"gridN", hn}}},
               {"hydrogen",
                {{"residualWrms", hydRow.wrms},
                 {"residualMax", hydRow.maxAbs},
                 {"energy", hydRow.energy},
                 {"energyExact", hydRow.energyExact},
                 {"energyRelError", hydRow.energyRel},
                 {"gridN", yn}}}};
  r.csv = "system,residualWrms,residualMax,energy,energyExact\n";
  r.csv += "harmonic," + io::fmt(harmRow.wrms) + ',' + io::fmt(harmRow.maxAbs) +
           ',' + io::fmt(harmRow.energy) + ',' + io::fmt(harmRow.energyExact) + '\n';
  r.csv += "hydrogen," + io::fmt(hydRow.wrms) + ',' + io::fmt(hydRow.maxAbs) +
           ',' + io::fmt(hydRow.energy) + ',' + io::fmt(hydRow.energyExact) + '\n';
  r.checks.push_back(make_check("harmonic_residual", harmRow.wrms, residualTol));
  r.checks.push_back(make_check("harmonic_energy", harmRow.energyRel,
                                p_num(p, "harmonicEnergyTol", 1.0e-6)));
  r.checks.push_back(make_check("hydrogen_residual", hydRow.wrms, residualTol));
  r.checks.push_back(make_check("hydrogen_energy", hydRow.energyRel,
                                p_num(p, "hydrogenEnergyTol", 1.0e-4)));
  return r;
}

RunResult run_mass(const Config& cfg) {
  const json& p = cfg.params;
  const PhysicalConstants pc = preset(cfg.unitPreset);
  ledger::ReplayReport rep;
  if (p.contains("logFile")) {
    rep = ledger::replay_log_file(p.at("logFile").get<std::string>());
  } else {
    const json ini = p.value("initial", json::object());
    ledger::Terms t0;
    t0.v1 = ini.value("v1", 0.0);
    t0.v2 = ini.value("v2", 0.0);
    t0.ek = ini.value("ek", 0.0);
    t0.noise = ini.value("noise", 0.0);
    const auto st = ledger::state_from_mass(
        ini.value("energy", pc.mass * pc.c * pc.c), t0,
        ini.value("radius", 2.8179403e-15), ini.value("nuRot", 1.0e20),
        ini.value("mass", pc.mass));
    std::vector<ledger::Transition> events;
    for (const auto& e : p.value("transitions", json::array())) {
      ledger::Transition tr;
      tr.deltaE = e.value("deltaE", 0.0);
      tr.jitter = e.value("jitter", 0.0);
      if (e.contains("terms")) {
        ledger::Terms nt;
        nt.v1 = e.at("terms").value("v1", 0.0);
        nt.v2 = e.at("terms").value("v2", 0.0);
        nt.ek = e.at("terms").value("ek", 0.0);
        nt.noise = e.at("terms").value("noise", 0.0);
        tr.newTerms = nt;
      }
      events.push_back(tr);
    }
    rep = ledger::replay_log_json(ledger::log_to_json(st, events));
  }

  const double driftTol = p_num(p, "driftTol", 1.0e-15);
  const double residualTol = p_num(p, "residualTol", 1.0e-12);
  RunResult r;
  r.results = {{"events", rep.nEvents},
               {"maxMassDrift", rep.maxMassDrift},
               {"maxInvariantResidual", rep.maxInvariantResidual},
               {"finalMass", rep.finalState.mass},
               {"finalNuVib", rep.finalState.nuVib},
               {"finalEnergy", rep.finalState.energy}};
  r.csv = "metric,value\n";
  r.csv += "events," + io::fmt(rep.nEvents) + '\n';
  r.csv += "maxMassDrift," + io::fmt(rep.maxMassDrift) + '\n';
  r.csv += "maxInvariantResidual," + io::fmt(rep.maxInvariantResidual) + '\n';
  r.csv += "finalMass," + io::fmt(rep.finalState.mass) + '\n';
  r.checks.push_back(make_check("mass_drift", rep.maxMassDrift, driftTol));
  r.checks.push_back(
      make_check("invariant_residual", rep.maxInvariantResidual, residualTol));
  return r;
}

RunResult run_em(const Config& cfg) {
  const json& p = cfg.params;
  const PhysicalConstants pc = preset(cfg.unitPreset);
  EmConstants k = EmConstants::si();
  if (p.contains("charge")) k.charge = p.at("charge").get<double>();
  if (p.contains("rMin")) k.rMin = p.at("rMin").get<double>();
  k.validate();
  const double dv = p_num(p, "dv", 0.1 * k.c);
  const int order = p_int(p, "order", 4);

  const double mMag = ed::magnetic_mass(k);
  const double eMag = ed::magnetic_energy(dv, k);
  const double eRad = ed::radiated_energy(dv, k);
  const auto series = ledger::relativistic_expansion(mMag, dv, k.c, order);
  const auto split = ledger::energy_split(mMag, dv, k.c);
  const auto larmor = ed::poynting_and_larmor(dv, 1.0, 4096, k);

  const double mRef = 9.10952e-31;
  const double mRel = std::abs(mMag - mRef) / mRef;
  const double splitRes =
      std::abs(split.magnetic + split.radiation - series.exact) / series.exact;
  const double term2Res =
      std::abs(eRad - series.terms.at(1)) / series.terms.at(1);
  const double quadRes = std::abs(larmor.powerQuad / larmor.powerClosed - 1.0);
  const double x = (dv / k.c) * (dv / k.c);
  const double ratioRes = std::abs(eRad / eMag / (0.75 * x) - 1.0);

  double splitFuzz = 0.0;
  rng::NormalStream ns(cfg.seed, 1);
  for (std::uint32_t c = 0; c < 64; ++c) {
    const auto draw = [&](int s) { return ns.normal(c, s); };
    const Vec3 pS{draw(0), draw(1), draw(2)};
    const Vec3 b{draw(3), draw(4), draw(5)};
    const Vec3 v{draw(6), draw(7), draw(8)};
    const Vec3 e{draw(9), draw(10), draw(11)};
    const auto sp = ed::interaction_potentials(pS, b, v, e, pc.mass, k.c, k.charge);
    const double scale = k.charge / (pc.mass * k.c * k.c) * norm(pS) *
                         norm(b + v) * norm(e);
    splitFuzz = std::max(
        splitFuzz, std::abs(sp.spinOrbit + sp.spinSpin - sp.unsplit) /
                       std::max(std::abs(sp.unsplit), 1.0e-3 * scale));
  }

  RunResult r;
  r.results = {{"magneticMass", mMag},
               {"magneticMassReference", mRef},
               {"magneticMassRelError", mRel},
               {"magneticEnergy", eMag},
               {"radiatedEnergy", eRad},
               {"radiatedOverMagnetic", eRad / eMag},
               {"seriesCoefficients", series.coefficients},
               {"seriesTerms", series.terms},
               {"seriesExact", series.exact},
               {"splitMagnetic", split.magnetic},
               {"splitRadiation", split.radiation},
               {"splitSumResidual", splitRes},
               {"radiatedTermResidual", term2Res},
               {"larmorPowerClosed", larmor.powerClosed},
               {"larmorPowerQuadrature", larmor.powerQuad},
               {"larmorQuadResidual", quadRes},
               {"energyRatioResidual", ratioRes},
               {"interactionSplitResidual", splitFuzz},
               {"dv", dv},
               {"charge", k.charge},
               {"rMin", k.rMin}};
  r.csv = "metric,value\n";
  r.csv += "magneticMass," + io::fmt(mMag) + '\n';
  r.csv += "magneticEnergy," + io::fmt(eMag) + '\n';
  r.csv += "radiatedEnergy," + io::fmt(eRad) + '\n';
  for (std::size_t i = 0; i < series.terms.size(); ++i)
    r.csv += "seriesTerm" + std::to_string(i + 1) + ',' +
             io::fmt(series.terms[i]) + '\n';
  r.checks.push_back(make_check("magnetic_mass_sigfigs", mRel, 5.5e-7));
  r.checks.push_back(make_check("energy_split_sum", splitRes, 1.0e-12));
  r.checks.push_back(
      make_check("radiated_equals_series_term", term2Res, 1.0e-12));
  r.checks.push_back(make_check("larmor_prefactor", quadRes, 1.0e-9));
  r.checks.push_back(make_check("interaction_split", splitFuzz, 1.0e-12));
  return r;
}

RunResult run_spin(const Config& cfg) {
  const json& p = cfg.params;
  const PhysicalConstants pc = preset(cfg.unitPreset);
  const int cases = p_int(p, "cases", 1000);
  const int gn = p_int(p, "gridN", 12);
  const int nDens = p_int(p, "densities", 4);
  const double tol = p_num(p, "tolerance", 1.0e-12);

  rng::NormalStream ns(cfg.seed, 0);
  double cliffordMax = 0.0;
  std::string caseCsv;
  for (int c = 0; c < cases; ++c) {
    const auto draw = [&](int s) { return ns.normal(c, s); };
    const Vec3 g{draw(0), draw(1), draw(2)};
    const Vec3 t{draw(3), draw(4), draw(5)};
    Vec3 s = t - (dot(t, g) / norm2(g)) * g;
    if (norm2(s) < 1.0e-8 * norm2(t)) continue;
    const double res =
        fields::clifford_identity_residual(g, s) / (norm2(g) * norm2(s));
    cliffordMax = std::max(cliffordMax, res);
    csv_row(caseCsv, {static_cast<double>(c), res});
  }

  rng::NormalStream nd(cfg.seed, 2);
  double orthoGrad = 0.0, orthoAxis = 0.0, antisym = 0.0;
  Grid grid({gn, gn, gn}, {1.0 / gn, 1.0 / gn, 1.0 / gn}, {0.0, 0.0, 0.0},
            Boundary::Periodic);
  for (int d = 0; d < nDens; ++d) {
    ScalarField rho(grid);
    const auto draw = [&](int s) { return nd.normal(d, s); };
    const double a[5] = {0.3 * draw(0), 0.3 * draw(1), 0.3 * draw(2),
                         0.3 * draw(3), 0.3 * draw(4)};
    const double ph[5] = {kPi * draw(5), kPi * draw(6), kPi * draw(7),
                          kPi * draw(8), kPi * draw(9)};
    for (std::size_t n = 0; n < grid.size(); ++n) {
      const Vec3 x = grid.coords(n);
      const double w = 2.0 * kPi;
      rho[n] = std::exp(a[0] * std::cos(w * x.x + ph[0]) +
                        a[1] * std::cos(w * x.y + ph[1]) +
                        a[2] * std::cos(w * x.z + ph[2]) +
                        a[3] * std::cos(w * (x.x + x.y) + ph[3]) +
                        a[4] * std::cos(w * (x.y + x.z) + ph[4]));
    }
    Vec3 axis{draw(10), draw(11), draw(12)};
    if (norm(axis) < 1.0e-6) axis = {1.0, 0.0, 0.0};
    axis *= 1.0 / norm(axis);

    const auto dp = fields::spin_drift(rho, axis, pc.mass, pc.hbar);
    const VectorField grad = fields::gradient(rho);
    double bMax = 0.0, gMax = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
      bMax = std::max(bMax, norm(dp.forward.vec(n)));
      gMax = std::max(gMax, norm(grad.vec(n)));
    }
    for (std::size_t n = 0; n < grid.size(); ++n) {
      const Vec3 b = dp.forward.vec(n);
      antisym = std::max(antisym, norm(b + dp.backward.vec(n)) / bMax);
      orthoAxis = std::max(orthoAxis, std::abs(dot(b, axis)) / bMax);
      orthoGrad =
          std::max(orthoGrad, std::abs(dot(b, grad.vec(n))) / (bMax * gMax));
    }
  }

  RunResult r;
  r.results = {{"cliffordMaxResidual", cliffordMax},
               {"orthogonalityGradMax", orthoGrad},
               {"orthogonalityAxisMax", orthoAxis},
               {"antisymmetryMax", antisym},
               {"cases", cases},
               {"densities", nDens},
               {"gridN", gn}};
  r.csv = "case,cliffordResidual\n" + caseCsv;
  r.checks.push_back(make_check("clifford_identity", cliffordMax, tol));
  r.checks.push_back(make_check("drift_antisymmetry", antisym, tol));
  r.checks.push_back(make_check("drift_orthogonality",
                                std::max(orthoGrad, orthoAxis), tol));
  return r;
}

}  // namespace

bool RunResult::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.pass; });
}

const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> names{
      "diffusion-recovery", "density-match",  "fp-evolve",
      "stationarity-audit", "mass-audit",     "em-budget",
      "spin-checks"};
  return names;
}

std::vector<std::string> validate_config(const json& j) {
  std::vector<std::string> d;
  if (!j.is_object()) {
    d.push_back("config root must be an object");
    return d;
  }
  static const std::set<std::string> top{"experiment", "seed", "unitPreset",
                                         "params", "out"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!top.count(key)) d.push_back("unknown key `" + key + "`");
  }

  std::string exp;
  if (!j.contains("experiment")) {
    d.push_back("missing key `experiment`");
  } else if (!j.at("experiment").is_string()) {
    d.push_back("`experiment` must be a string");
  } else {
    exp = j.at("experiment").get<std::string>();
    const auto& names = known_experiments();
    if (std::find(names.begin(), names.end(), exp) == names.end()) {
      d.push_back("`experiment` must be one of: " + experiment_list());
      exp.clear();
    }
  }

  if (!j.contains("seed")) {
    d.push_back("missing key `seed`");
  } else {
    const json& s = j.at("seed");
    const bool ok = s.is_number_unsigned() ||
                    (s.is_number_integer() && s.get<long long>() >= 0);
    if (!ok) d.push_back("`seed` must be a non-negative integer");
  }

  if (j.contains("unitPreset")) {
    const json& u = j.at("unitPreset");
    if (!u.is_string() || (u.get<std::string>() != "SI" &&
                           u.get<std::string>() != "natural"))
      d.push_back("`unitPreset` must be \"SI\" or \"natural\"");
  }
  if (j.contains("out") && !j.at("out").is_string())
    d.push_back("`out` must be a string");

  if (j.contains("params")) {
    const json& p = j.at("params");
    if (!p.is_object()) {
      d.push_back("`params` must be an object");
    } else if (!exp.empty()) {
      const auto& specs = param_table().at(exp);
      for (const auto& [key, value] : p.items()) {
        const auto it = std::find_if(
            specs.begin(), specs.end(),
            [&key = key](const ParamSpec& ps) { return key == ps.name; });
        if (it == specs.end()) {
          d.push_back("unknown parameter `params." + key + "` for " + exp);
        } else if (!type_ok(value, it->type)) {
          d.push_back("`params." + key + "` must be " + type_name(it->type));
        }
      }
    }
  }
  return d;
}

std::vector<std::string> validate_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {"cannot open " + path};
  try {
    return validate_config(json::parse(in));
  } catch (const json::parse_error& e) {
    return {e.what()};
  }
}

Config config_from_json(const json& j) {
  const auto diag = validate_config(j);
  if (!diag.empty()) {
    std::string msg = "invalid config:";
    for (const auto& m : diag) msg += "\n  " + m;
    throw std::runtime_error(msg);
  }
  Config cfg;
  cfg.experiment = j.at("experiment").get<std::string>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.unitPreset = j.value("unitPreset", "SI");
  cfg.params = j.value("params", json::object());
  cfg.outRoot = j.value("out", "runs");
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return config_from_json(json::parse(in));
}

RunResult run(const Config& cfg) {
  RunResult r;
  if (cfg.experiment == "diffusion-recovery") r = run_diffusion(cfg);
  else if (cfg.experiment == "density-match") r = run_density(cfg);
  else if (cfg.experiment == "fp-evolve") r = run_fp(cfg);
  else if (cfg.experiment == "stationarity-audit") r = run_stationarity(cfg);
  else if (cfg.experiment == "mass-audit") r = run_mass(cfg);
  else if (cfg.experiment == "em-budget") r = run_em(cfg);
  else if (cfg.experiment == "spin-checks") r = run_spin(cfg);
  else throw std::runtime_error("unknown experiment " + cfg.experiment);
  r.results["experiment"] = cfg.experiment;
  r.results["seed"] = cfg.seed;
  r.results["unitPreset"] = cfg.unitPreset;
  return r;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string run_dir_name(const Config& cfg) {
  const json sem{{"experiment", cfg.experiment},
                 {"seed", cfg.seed},
                 {"unitPreset", cfg.unitPreset},
                 {"params", cfg.params}};
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(sem.dump());
  return cfg.outRoot + "/" + cfg.experiment + "-" + hex.str();
}

json invariants_json(const std::vector<Check>& checks) {
  json arr = json::array();
  bool all = true;
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"value", c.value},
                   {"threshold", c.threshold},
                   {"pass", c.pass}});
    all = all && c.pass;
  }
  return {{"ok", all}, {"checks", arr}};
}

std::string write_run(const Config& cfg, const RunResult& r, double wallSeconds) {
  namespace fs = std::filesystem;
  const std::string dir = run_dir_name(cfg);
  fs::create_directories(dir);
  const auto dump = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + dir + "/" + name);
    out << text;
  };
  dump("results.json", r.results.dump(2) + "\n");
  dump("invariants.json", invariants_json(r.checks).dump(2) + "\n");
  if (!r.csv.empty()) dump("results.csv", r.csv);

  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32] = {0};
  std::strftime(stamp, sizeof stamp, "%FT%TZ", std::gmtime(&tt));
  const json manifest{{"experiment", cfg.experiment},
                      {"seed", cfg.seed},
                      {"unitPreset", cfg.unitPreset},
                      {"params", cfg.params},
                      {"out", cfg.outRoot},
                      {"threads", threads_for(cfg)},
                      {"version", ZITTER_VERSION},
                      {"wallTimeSeconds", wallSeconds},
                      {"timestamp", stamp},
                      {"ok", r.ok()}};
  dump("manifest.json", manifest.dump(2) + "\n");
  return dir;
}

}  // namespace zitter::experiment
