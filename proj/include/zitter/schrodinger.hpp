#pragma once
#include <functional>
#include <optional>

#include "zitter/fields.hpp"
#include "zitter/grid.hpp"

namespace zitter::schrod {

// H = (-i hbar grad + (q/c) A)^2 / 2m + V + q phi + energyShift.
// The kinetic term is discretized with gauge-link phases
// theta = (q h / (hbar c)) * A averaged to the cell face, which keeps H
// Hermitian and makes lattice gauge transforms exact. A and phi require
// charge and c to be set. Radial grids solve the l = 0 problem through the
// substitution u = r psi.
struct HamiltonianSpec {
  ScalarField potential;
  double mass = 1.0;
  double hbar = 1.0;
  std::optional<double> energyShift;          // uniform, J
  std::optional<VectorField> vectorPotential; // A
  std::optional<ScalarField> scalarPotential; // phi
  double charge = 0.0;
  double lightSpeed = 0.0;

  void validate() const;
  bool magnetic() const { return vectorPotential.has_value(); }
};

WaveFunction apply_h(const HamiltonianSpec& spec, const WaveFunction& psi);

// Weighted inner product and <psi|H|psi>.
std::complex<double> inner(const WaveFunction& a, const WaveFunction& b);
double energy_expectation(const HamiltonianSpec& spec, const WaveFunction& psi);

struct EigenSolution {
  std::vector<double> energies;
  std::vector<WaveFunction> states;        // unit norm, deterministic sign
  std::vector<double> residualNorms;       // |H psi - E psi| / |H psi|
};

// Lowest-k eigenpairs of a real H (no vector potential): dense solve on a
// coarsened copy of the grid supplies shift estimates and start vectors,
// shifted inverse iteration with sparse LU refines on the full grid.
EigenSolution solve_stationary(const HamiltonianSpec& spec, int k,
                               double tol = 1.0e-10);

struct EvolveOptions {
  int snapshotStride = 0;  // 0 = keep no intermediate states
  // When set, called once per step with the current state; the returned
  // energy is applied as a uniform potential shift for that step.
  std::function<double(const WaveFunction&)> couplingShift;
};

struct EvolveResult {
  WaveFunction psi;
  std::vector<double> times;     // recorded alongside norms/energies
  std::vector<double> norms;
  std::vector<double> energies;
  std::vector<WaveFunction> snapshots;
  std::vector<double> snapshotTimes;
};

// Crank-Nicolson: (I + i dt H / 2 hbar) psi' = (I - i dt H / 2 hbar) psi,
// solved with a sparse LU factorization (exact to rounding, refactored only
// when H changes).
EvolveResult evolve(const HamiltonianSpec& spec, const WaveFunction& psi0,
                    double dt, int nSteps, const EvolveOptions& opts = {});

// Same machinery; named entry point for runs with a vector potential.
EvolveResult evolve_magnetic(const HamiltonianSpec& spec, const WaveFunction& psi0,
                             double dt, int nSteps, const EvolveOptions& opts = {});

struct MadelungFields {
  ScalarField rho;
  ScalarField logAmplitude;  // R
  ScalarField phase;         // S (unwrapped)
  VectorField osmotic;       // u  = (hbar/2m) grad rho / rho
  VectorField current;       // upsilon = (hbar/m) grad S - v
  VectorField driftForward;  // b  = upsilon + u
  VectorField driftBackward; // b* = upsilon - u
};
MadelungFields madelung_fields(const WaveFunction& psi, const VectorField& v);

}  // namespace zitter::schrod
