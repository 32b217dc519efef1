#pragma once
#include "zitter/grid.hpp"

namespace zitter::fields {

// Central differences in the interior, one-sided at non-periodic boundaries,
// wrap-around for periodic grids. Radial grids use the spherical forms
// (div v = v' + 2v/r, lap f = f'' + 2f'/r).
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);

ScalarField density_from_wavefunction(const WaveFunction& psi);
ScalarField charge_mass_density(const ScalarField& rho, double factor);

// u = beta * grad(rho) / rho with rho floored at floorFrac * max(rho).
VectorField osmotic_velocity(const ScalarField& rho, double beta,
                             double floorFrac = 1.0e-12);

struct PhaseAmplitude {
  ScalarField logAmplitude;  // R = ln|psi|
  ScalarField phase;         // S, unwrapped axis-sequentially in row-major order
};
PhaseAmplitude phase_and_amplitude(const WaveFunction& psi);

// grad(S) computed from phase differences of neighbouring nodes, so 2*pi
// branch cuts in S never leak into the derivative.
VectorField phase_gradient(const WaveFunction& psi);

// upsilon = (hbar/m) grad(S) - v
VectorField transition_velocity(const ScalarField& phase, const VectorField& v,
                                double mass, double hbar);

struct DriftPair {
  VectorField forward;   // b  = upsilon + u
  VectorField backward;  // b* = upsilon - u
};
DriftPair drift_fields(const VectorField& current, const VectorField& osmotic);

// Spin-sourced drift on 3-D grids: b = (hbar/2m) (grad rho / rho) x axis,
// b* = -b. |axis| must be 1.
DriftPair spin_drift(const ScalarField& rho, const Vec3& axis, double mass,
                     double hbar, double floorFrac = 1.0e-12);

// J = [sign * (grad rho / (m rho)) x s + v] * rho with s = (hbar/2) * axis.
VectorField spin_current_density(const ScalarField& rho, const Vec3& axis,
                                 const VectorField& v, double mass, double hbar,
                                 int sign, double floorFrac = 1.0e-12);

// |(g x s)^2 - g^2 s^2|; zero iff g and s are orthogonal.
double clifford_identity_residual(const Vec3& g, const Vec3& s);

}  // namespace zitter::fields
