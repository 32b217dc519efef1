#include "zitter/mass_ledger.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "zitter/constants.hpp"
#include "zitter/grid.hpp"

namespace zitter::ledger {

namespace {
double geometry_factor(const State& s) {
  return 4.0 * kPi * s.radius * s.radius * s.nuVib * s.nuRot;
}
}  // namespace

double State::invariant_residual() const {
  const double lhs = mass * 4.0 * kPi * radius * radius * nuVib * nuRot;
  const double rhs = eNet();
  return std::abs(lhs - rhs) / std::abs(rhs);
}

void State::validate() const {
  require(radius > 0.0, "ledger: radius must be > 0");
  require(nuVib > 0.0 && nuRot > 0.0, "ledger: frequencies must be > 0");
  require(mass > 0.0, "ledger: mass must be > 0");
  require(eNet() > 0.0, "ledger: net energy must be > 0");
  require(invariant_residual() <= 1.0e-12, "ledger: mass invariant violated");
}

State state_from_mass(double energy, const Terms& terms, double radius,
                      double nuRot, double mass) {
  State s;
  s.energy = energy;
  s.terms = terms;
  s.radius = radius;
  s.nuRot = nuRot;
  s.mass = mass;
  require(mass > 0.0 && radius > 0.0 && nuRot > 0.0,
          "state_from_mass: mass, radius, nuRot must be > 0");
  const double eNet = s.eNet();
  require(eNet > 0.0, "state_from_mass: net energy must be > 0");
  s.nuVib = eNet / (4.0 * kPi * radius * radius * mass * nuRot);
  s.validate();
  return s;
}

State state_from_frequencies(double energy, const Terms& terms, double radius,
                             double nuVib, double nuRot) {
  State s;
  s.energy = energy;
  s.terms = terms;
  s.radius = radius;
  s.nuVib = nuVib;
  s.nuRot = nuRot;
  require(radius > 0.0 && nuVib > 0.0 && nuRot > 0.0,
          "state_from_frequencies: radius and frequencies must be > 0");
  const double eNet = s.eNet();
  require(eNet > 0.0, "state_from_frequencies: net energy must be > 0");
  s.mass = eNet / geometry_factor(s);
  s.validate();
  return s;
}

double ledger_mass(const State& s) { return s.eNet() / geometry_factor(s); }

State apply_transition(const State& s, const Transition& tr) {
  s.validate();
  const double change = tr.deltaE + tr.jitter;
  State out = s;
  if (tr.newTerms) {
    out.terms = *tr.newTerms;
    const double expected = s.eNet() + change;
    const double got = out.eNet();
    require(std::abs(got - expected) <= 1.0e-9 * std::abs(expected),
            "apply_transition: replacement terms do not balance deltaE");
  } else {
    out.terms.v1 -= change;  // lowers e0, raising eNet by exactly `change`
  }
  const double eNet = out.eNet();
  if (!(eNet > 0.0))
    throw std::invalid_argument("apply_transition: transition exhausts the net energy");
  // The mass is never touched; the vibration frequency absorbs the change.
  out.nuVib = eNet / (4.0 * kPi * out.radius * out.radius * out.mass * out.nuRot);
  out.validate();
  return out;
}

double time_unit(double nu) {
  require(nu > 0.0, "time_unit: nu must be > 0");
  return 1.0 / nu;
}

double related_time_unit(double tpp, double dv, double c) {
  require(c > 0.0, "related_time_unit: c must be > 0");
  require(std::abs(dv) < c, "related_time_unit: |dv| must be < c");
  const double x = (dv / c) * (dv / c);
  return tpp / std::sqrt(1.0 - x);
}

double mass_dilation(double m0, double dv, double c) {
  require(c > 0.0, "mass_dilation: c must be > 0");
  require(std::abs(dv) < c, "mass_dilation: |dv| must be < c");
  const double x = (dv / c) * (dv / c);
  return m0 / std::sqrt(1.0 - x);
}

double gamma_minus_one(double x) {
  require(x >= 0.0 && x < 1.0, "gamma_minus_one: need 0 <= x < 1");
  const double s = std::sqrt(1.0 - x);
  return x / (s * (1.0 + s));
}

double ExpansionResult::partial_sum(int nTerms) const {
  require(nTerms >= 0 && static_cast<std::size_t>(nTerms) <= terms.size(),
          "partial_sum: nTerms out of range");
  double s = 0.0;
  for (int i = 0; i < nTerms; ++i) s += terms[i];
  return s;
}

ExpansionResult relativistic_expansion(double m0, double dv, double c, int order) {
  require(order >= 1 && order <= 60, "relativistic_expansion: order must be 1..60");
  require(c > 0.0, "relativistic_expansion: c must be > 0");
  require(std::abs(dv) < c, "relativistic_expansion: |dv| must be < c");
  const double x = (dv / c) * (dv / c);
  const double e0 = m0 * c * c;
  ExpansionResult r;
  // coef_1 = 1/2, coef_{k+1} = coef_k (2k+1)/(2k+2): central binomials / 4^k.
  double coef = 0.5;
  double xk = x;
  for (int k = 1; k <= order; ++k) {
    r.coefficients.push_back(coef);
    r.terms.push_back(coef * e0 * xk);
    coef *= static_cast<double>(2 * k + 1) / static_cast<double>(2 * k + 2);
    xk *= x;
  }
  r.exact = e0 * gamma_minus_one(x);
  return r;
}

EnergySplit energy_split(double m0, double dv, double c) {
  require(c > 0.0, "energy_split: c must be > 0");
  require(std::abs(dv) < c, "energy_split: |dv| must be < c");
  const double x = (dv / c) * (dv / c);
  EnergySplit sp;
  sp.magnetic = 0.5 * m0 * dv * dv;
  // gamma-1-x/2 without cancellation: x^2 (3+x) / (2 s (1+s) (1+x+s)),
  // s = sqrt(1-x); equals the series (3/8) x^2 + (5/16) x^3 + ...
  const double s = std::sqrt(1.0 - x);
  sp.radiation =
      m0 * c * c * x * x * (3.0 + x) / (2.0 * s * (1.0 + s) * (1.0 + x + s));
  return sp;
}

namespace {

nlohmann::json terms_to_json(const Terms& t) {
  return {{"v1", t.v1}, {"v2", t.v2}, {"ek", t.ek}, {"noise", t.noise}};
}

Terms terms_from_json(const nlohmann::json& j) {
  Terms t;
  t.v1 = j.at("v1").get<double>();
  t.v2 = j.at("v2").get<double>();
  t.ek = j.at("ek").get<double>();
  t.noise = j.at("noise").get<double>();
  return t;
}

}  // namespace

std::string log_to_json(const State& initial, const std::vector<Transition>& events) {
  nlohmann::json j;
  j["initial"] = {{"energy", initial.energy},
                  {"terms", terms_to_json(initial.terms)},
                  {"radius", initial.radius},
                  {"nuVib", initial.nuVib},
                  {"nuRot", initial.nuRot},
                  {"mass", initial.mass}};
  j["events"] = nlohmann::json::array();
  for (const auto& e : events) {
    nlohmann::json ev = {{"deltaE", e.deltaE}, {"jitter", e.jitter}};
    if (e.newTerms) ev["terms"] = terms_to_json(*e.newTerms);
    j["events"].push_back(ev);
  }
  return j.dump(2);
}

ReplayReport replay_log_json(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json);
  const auto& ji = j.at("initial");
  State s;
  s.energy = ji.at("energy").get<double>();
  s.terms = terms_from_json(ji.at("terms"));
  s.radius = ji.at("radius").get<double>();
  s.nuVib = ji.at("nuVib").get<double>();
  s.nuRot = ji.at("nuRot").get<double>();
  s.mass = ji.at("mass").get<double>();
  s.validate();

  ReplayReport rep;
  const double m0 = s.mass;
  rep.maxInvariantResidual = s.invariant_residual();
  for (const auto& ev : j.at("events")) {
    Transition tr;
    tr.deltaE = ev.at("deltaE").get<double>();
    tr.jitter = ev.value("jitter", 0.0);
    if (ev.contains("terms")) tr.newTerms = terms_from_json(ev.at("terms"));
    s = apply_transition(s, tr);
    ++rep.nEvents;
    rep.maxMassDrift = std::max(rep.maxMassDrift, std::abs(s.mass - m0) / m0);
    rep.maxInvariantResidual = std::max(rep.maxInvariantResidual, s.invariant_residual());
  }
  rep.finalState = s;
  rep.ok = rep.maxMassDrift <= 1.0e-15 && rep.maxInvariantResidual <= 1.0e-12;
  return rep;
}

ReplayReport replay_log_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(path + ": cannot open");
  std::ostringstream ss;
  ss << is.rdbuf();
  return replay_log_json(ss.str());
}

}  // namespace zitter::ledger
