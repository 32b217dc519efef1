#pragma once
#include <numbers>
#include <stdexcept>

namespace zitter {

inline constexpr double kPi = std::numbers::pi;

// Mechanical constants for the diffusion/wave machinery. beta() is the
// diffusion coefficient hbar/2m that links the random-walk and wave pictures.
struct PhysicalConstants {
  double hbar = 1.0545718e-34;  // J s
  double mass = 9.10938e-31;    // kg (electron)
  double c = 2.99792458e8;      // m/s
  double charge = 1.602189e-19; // C

  double beta() const { return hbar / (2.0 * mass); }
  double planck() const { return 2.0 * kPi * hbar; }

  static PhysicalConstants si() { return {}; }
  // hbar = m = 1; c and charge keep SI values (only mechanics rescales).
  static PhysicalConstants natural() {
    PhysicalConstants k;
    k.hbar = 1.0;
    k.mass = 1.0;
    return k;
  }
};

// Electromagnetic constants. rMin is the smallest radius entering the
// self-energy integrals (classical electron radius by default).
struct EmConstants {
  double mu0 = 4.0 * kPi * 1.0e-7;   // T m / A
  double c = 2.99792458e8;           // m/s
  double eps0 = 1.0 / (4.0 * kPi * 1.0e-7 * 2.99792458e8 * 2.99792458e8);
  double charge = 1.602189e-19;      // C
  double rMin = 2.8179403e-15;       // m

  void validate() const {
    const double r = mu0 * eps0 * c * c;
    if (!(r > 1.0 - 1.0e-10 && r < 1.0 + 1.0e-10))
      throw std::invalid_argument("EmConstants: mu0*eps0*c^2 != 1");
    if (!(rMin > 0.0)) throw std::invalid_argument("EmConstants: rMin <= 0");
  }

  static EmConstants si() { return {}; }
};

}  // namespace zitter
