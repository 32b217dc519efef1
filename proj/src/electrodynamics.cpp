#include "zitter/electrodynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "zitter/fields.hpp"

namespace zitter::ed {

VectorField transition_current(const ScalarField& rhoE, const VectorField& u,
                               const Vec3& dvol) {
  require_same_grid(rhoE.grid(), u.grid(), "transition_current");
  VectorField j(rhoE.grid());
  for (std::size_t n = 0; n < rhoE.size(); ++n) {
    j.set_vec(n, (2.0 * u.vec(n) + dvol) * rhoE[n]);
  }
  return j;
}

Vec3 biot_savart_point(const Vec3& dv, double r, const Vec3& nhat,
                       const EmConstants& k) {
  require(r > 0.0, "biot_savart_point: r must be positive");
  return cross(nhat, dv) * (-k.charge / (k.c * r * r));
}

Vec3 field_from_current(const VectorField& j, const Vec3& point,
                        const EmConstants& k, double guardRadius) {
  const Grid& g = j.grid();
  const double guard = guardRadius > 0.0 ? guardRadius : 1.5 * g.max_spacing();
  Vec3 b;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 jn = j.vec(n);
    if (jn.x == 0.0 && jn.y == 0.0 && jn.z == 0.0) continue;
    const Vec3 rvec = point - g.coords(n);
    const double r = norm(rvec);
    require(r >= guard, "field_from_current: point within guard radius of "
                        "source node " + std::to_string(n));
    b += cross(rvec * (1.0 / r), jn) * (-g.weight(n) / (k.c * r * r));
  }
  return b;
}

double magnetic_mass(const EmConstants& k) {
  require(k.rMin > 0.0, "magnetic_mass: rMin must be positive");
  return k.mu0 * k.charge * k.charge / (4.0 * kPi * k.rMin);
}

double magnetic_energy(double dv, const EmConstants& k) {
  return 0.5 * magnetic_mass(k) * dv * dv;
}

LarmorReport poynting_and_larmor(double dv, double accel, int nTheta,
                                 const EmConstants& k) {
  require(nTheta >= 2 && nTheta % 2 == 0,
          "poynting_and_larmor: nTheta must be even and >= 2");
  const double c3 = k.c * k.c * k.c;
  const double amp =
      k.charge * k.charge * std::abs(dv) * accel * accel / (kPi * c3);
  LarmorReport rep;
  rep.theta.resize(nTheta + 1);
  rep.flux.resize(nTheta + 1);
  const double h = kPi / nTheta;
  double simpson = 0.0;
  for (int i = 0; i <= nTheta; ++i) {
    const double th = h * i;
    const double s = std::sin(th);
    rep.theta[i] = th;
    rep.flux[i] = amp * s * s * s;
    const double w = (i == 0 || i == nTheta) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    simpson += w * rep.flux[i] * s;
  }
  rep.powerQuad = simpson * h / 3.0;
  rep.powerClosed = 0.375 * k.charge * k.charge * std::abs(dv) * accel * accel / c3;
  return rep;
}

double radiated_energy(double dv, const EmConstants& k) {
  require(std::abs(dv) < k.c, "radiated_energy: |dv| must be below c");
  return 0.375 * magnetic_mass(k) * dv * dv * dv * dv / (k.c * k.c);
}

Vec3 spin_transition_bfield(const ScalarField& rho, const VectorField& b,
                            const VectorField& v, double r, double mass,
                            double hbar, const EmConstants& k) {
  require_same_grid(rho.grid(), b.grid(), "spin_transition_bfield");
  require_same_grid(rho.grid(), v.grid(), "spin_transition_bfield");
  require(r > 0.0, "spin_transition_bfield: r must be positive");
  const VectorField grad = fields::gradient(rho);
  const double maxRho = rho.max_abs();
  const double floor = maxRho > 0.0 ? 1.0e-12 * maxRho
                                    : std::numeric_limits<double>::min();
  const double halfH = kPi * hbar;  // h/2 with h = 2 pi hbar
  const Grid& g = rho.grid();
  Vec3 acc;
  double wsum = 0.0;
  for (std::size_t n = 0; n < rho.size(); ++n) {
    const double d = std::max(rho[n], floor);
    const Vec3 pS = grad.vec(n) * (halfH / d);
    const double w = rho[n] * g.weight(n);
    acc += cross(pS, b.vec(n) + v.vec(n)) * w;
    wsum += w;
  }
  require(wsum > 0.0, "spin_transition_bfield: rho has no weight");
  const double pref = k.charge / (mass * k.c * k.c) /
                      (4.0 * kPi * k.eps0 * r * r * r);
  return acc * (pref / wsum);
}

InteractionSplit interaction_potentials(const Vec3& pS, const Vec3& b,
                                        const Vec3& v, const Vec3& eField,
                                        double mass, double c, double q) {
  InteractionSplit out;
  const Vec3 b0 = cross(v, eField) * (-1.0 / c);
  const Vec3 bs = cross(b, eField) * (-1.0 / c);
  const double g = q / (mass * c);
  out.spinOrbit = g * dot(pS, b0);
  out.spinSpin = g * dot(pS, bs);
  out.unsplit = -(q / (mass * c * c)) * dot(pS, cross(b + v, eField));
  return out;
}

}  // namespace zitter::ed
