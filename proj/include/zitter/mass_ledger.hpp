#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace zitter::ledger {

// Energy bookkeeping terms. The reference level is e0 = v1 - v2 - ek and the
// net confined energy is E - e0 + noise.
struct Terms {
  double v1 = 0.0;
  double v2 = 0.0;
  double ek = 0.0;
  double noise = 0.0;
};

// A confined-energy state whose mass is tied to the geometry and the two
// internal frequencies through  m = eNet / (4 pi R^2 nuVib nuRot).
struct State {
  double energy = 0.0;  // E, total
  Terms terms;
  double radius = 0.0;  // R
  double nuVib = 0.0;
  double nuRot = 0.0;
  double mass = 0.0;

  double e0() const { return terms.v1 - terms.v2 - terms.ek; }
  double eNet() const { return energy - e0() + terms.noise; }
  double invariant_residual() const;  // relative defect of the mass relation
  void validate() const;
};

// Solve nuVib so the stored mass satisfies the invariant exactly.
State state_from_mass(double energy, const Terms& terms, double radius,
                      double nuRot, double mass);
// Evaluate the mass from given frequencies.
State state_from_frequencies(double energy, const Terms& terms, double radius,
                             double nuVib, double nuRot);

// Recompute the mass from the current entries (cross-check of the stored one).
double ledger_mass(const State& s);

// Energy absorbed (+) or emitted (-), with measurement jitter folded in.
// Unless replacement terms are supplied, the change is absorbed into v1;
// nuVib is re-solved so the mass never moves.
struct Transition {
  double deltaE = 0.0;
  double jitter = 0.0;
  std::optional<Terms> newTerms;
};
State apply_transition(const State& s, const Transition& tr);

double time_unit(double nu);  // T = 1/nu
// T = Tpp / sqrt(1 - (dv/c)^2); |dv| < c enforced.
double related_time_unit(double tpp, double dv, double c);
double mass_dilation(double m0, double dv, double c);

// (gamma - 1) evaluated stably for x = (dv/c)^2 near 0.
double gamma_minus_one(double x);

// Kinetic-energy series m0 c^2 [ (1/2) x + (3/8) x^2 + (5/16) x^3 + ... ],
// x = (dv/c)^2: the binomial expansion of m0 c^2 (gamma - 1).
struct ExpansionResult {
  std::vector<double> coefficients;  // 1/2, 3/8, 5/16, 35/128, ...
  std::vector<double> terms;         // coefficient_k * m0 c^2 x^k
  double exact = 0.0;                // m0 c^2 (gamma - 1)
  double partial_sum(int nTerms) const;
};
ExpansionResult relativistic_expansion(double m0, double dv, double c, int order);

// E_magnetic = m0 dv^2 / 2 (exact); E_radiation = m0 c^2 (gamma-1) - E_magnetic.
struct EnergySplit {
  double magnetic = 0.0;
  double radiation = 0.0;
};
EnergySplit energy_split(double m0, double dv, double c);

// JSON event log: an initial state plus a transition list; replay verifies
// the mass invariant after every event.
std::string log_to_json(const State& initial, const std::vector<Transition>& events);
struct ReplayReport {
  int nEvents = 0;
  double maxMassDrift = 0.0;          // relative to the initial mass
  double maxInvariantResidual = 0.0;  // relative
  State finalState;
  bool ok = false;
};
ReplayReport replay_log_json(const std::string& json);
ReplayReport replay_log_file(const std::string& path);

}  // namespace zitter::ledger
