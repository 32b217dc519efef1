#pragma once
#include "zitter/fields.hpp"
#include "zitter/grid.hpp"

namespace zitter::fp {

// One density slice plus the total drift it is transported by (forward steps
// expect b + v, backward steps b* + v).
struct State {
  ScalarField rho;
  VectorField drift;
  double beta = 0.0;
  double t = 0.0;
};

struct StepDiagnostics {
  double massBefore = 0.0;
  double massAfter = 0.0;
  double minRho = 0.0;  // before clipping
  int clippedNodes = 0;
};

// Transport operators of this module. The Laplacian is defined as the exact
// composition div(grad(.)) of the module's central operators, so the discrete
// identity div(beta grad rho) = beta lap rho holds to rounding; the forward
// and backward right-hand sides then cancel nodewise exactly where the
// continuum algebra says they should.
VectorField gradc(const ScalarField& f);
ScalarField divc(const VectorField& v);
ScalarField lapc(const ScalarField& f);

// -div(drift rho) + beta lap rho and -div(drift rho) - beta lap rho.
ScalarField rhs_forward(const State& s, bool upwind = false);
ScalarField rhs_backward(const State& s, bool upwind = false);

// Largest explicit-Euler step this module accepts:
//   0.9 * min(h^2/(2 dim beta), h/max|drift|).
double stable_dt(const State& s);

// Explicit Euler update; throws if dt exceeds stable_dt. Negative densities
// are clipped to zero and counted in the diagnostics.
State forward_step(const State& s, double dt, bool upwind = false,
                   StepDiagnostics* diag = nullptr);
State backward_step(const State& s, double dt, bool upwind = false,
                    StepDiagnostics* diag = nullptr);

// (rhoB - rhoA)/dt + div((upsilon + v) rhoMid), rhoMid the slice average.
ScalarField continuity_residual(const ScalarField& rhoA, const ScalarField& rhoB,
                                double dt, const VectorField& upsilon,
                                const VectorField& v);

// E0/m + (hbar/2m) div u + |u|^2/2 - V/m, nodewise; zero on stationary states.
ScalarField stationarity_residual(const VectorField& u, const ScalarField& V,
                                  double E0, double mass, double hbar);

struct CoupledResiduals {
  VectorField osmotic;  // du/dt equation
  VectorField current;  // d(upsilon + v)/dt equation
};

// Residuals of the coupled first-order system for (u, upsilon + v); v is
// held static, fExt may be null. Spatial terms are evaluated on midpoint
// averages of the pairs.
CoupledResiduals coupled_field_residuals(const TimePair<VectorField>& u,
                                         const TimePair<VectorField>& upsilon,
                                         const VectorField& v,
                                         const ScalarField& V,
                                         const VectorField* fExt, double mass,
                                         double hbar);

}  // namespace zitter::fp
