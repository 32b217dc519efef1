#pragma once
#include <vector>

#include "zitter/constants.hpp"
#include "zitter/grid.hpp"

namespace zitter::ed {

// J = [2u + dvol] * rho_e nodewise.
VectorField transition_current(const ScalarField& rhoE, const VectorField& u,
                               const Vec3& dvol);

// B = -(1/c) nhat x q dv / r^2, so |B| = q |dv| sin(theta) / (c r^2).
Vec3 biot_savart_point(const Vec3& dv, double r, const Vec3& nhat,
                       const EmConstants& k);

// Quadrature of the point law over a current field: nhat runs from each
// source node to `point`. Zero-current nodes are skipped; a nonzero node
// inside guardRadius throws. guardRadius <= 0 means 1.5 * max spacing.
Vec3 field_from_current(const VectorField& j, const Vec3& point,
                        const EmConstants& k, double guardRadius = 0.0);

double magnetic_mass(const EmConstants& k);  // mu0 q^2 / (4 pi rMin)

// (1/2) magnetic_mass * dv^2; dv is the transition speed.
double magnetic_energy(double dv, const EmConstants& k);

struct LarmorReport {
  std::vector<double> theta;  // nTheta+1 uniform nodes on [0, pi]
  std::vector<double> flux;   // radial energy flux samples, ~ sin^3(theta)
  double powerClosed = 0.0;   // (3/8) q^2 |dv| accel^2 / c^3
  double powerQuad = 0.0;     // Simpson integral of flux * sin(theta)
};
// Angular radiation pattern of a transition dipole plus its total power,
// both in closed form and by theta-quadrature. nTheta must be even.
LarmorReport poynting_and_larmor(double dv, double accel, int nTheta,
                                 const EmConstants& k);

// (3/8) magnetic_mass * dv^4 / c^2; second term of the kinetic-energy
// expansion of magnetic_mass in (dv/c)^2. Throws for |dv| >= c.
double radiated_energy(double dv, const EmConstants& k);

// B = (q / m c^2) (1 / 4 pi eps0 r^3) <P_S x (b + v)> with the spin momentum
// P_S = (h/2) grad(rho)/rho and a rho-weighted grid average.
Vec3 spin_transition_bfield(const ScalarField& rho, const VectorField& b,
                            const VectorField& v, double r, double mass,
                            double hbar, const EmConstants& k);

struct InteractionSplit {
  double spinOrbit = 0.0;  // (q/mc) P_S . B0,  B0 = -(v x E)/c
  double spinSpin = 0.0;   // (q/mc) P_S . Bs,  Bs = -(b x E)/c
  double unsplit = 0.0;    // -(q/mc^2) P_S . [(b + v) x E]
};
InteractionSplit interaction_potentials(const Vec3& pS, const Vec3& b,
                                        const Vec3& v, const Vec3& eField,
                                        double mass, double c, double q);

}  // namespace zitter::ed
