#include <doctest.h>

#include <cmath>
#include <complex>

#include "testutil.hpp"
#include "zitter/fields.hpp"
#include "zitter/grid.hpp"

using namespace zitter;

namespace {

Grid line(int n, double lo, double hi, Boundary b) {
  return Grid({n}, {(hi - lo) / (n - 1)}, {lo}, b);
}

}  // namespace

TEST_CASE("gradient and laplacian are exact on quadratics") {
  Grid g({9, 11}, {0.25, 0.2}, {-1.0, -1.0}, Boundary::DirichletZero);
  ScalarField f(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 p = g.coords(n);
    f[n] = 0.25 * p.x * p.x - 0.5 * p.y * p.y + p.x + p.y + 2.0;
  }
  const VectorField grad = fields::gradient(f);
  const ScalarField lap = fields::laplacian(f);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 p = g.coords(n);
    CHECK(grad.comp(n, 0) == doctest::Approx(0.5 * p.x + 1.0).epsilon(1e-12));
    CHECK(grad.comp(n, 1) == doctest::Approx(-p.y + 1.0).epsilon(1e-12));
    CHECK(lap[n] == doctest::Approx(-0.5).epsilon(1e-11));
  }
}

TEST_CASE("radial operators take the spherical forms") {
  Grid g({40}, {0.05}, {0.05}, Boundary::DirichletZero, Geometry::RadialSpherical);
  ScalarField f(g);
  VectorField v(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double r = g.coord(0, static_cast<int>(n));
    f[n] = r * r;
    v.comp(n, 0) = r * r;
  }
  const ScalarField divv = fields::divergence(v);   // v' + 2v/r = 4r
  const ScalarField lapf = fields::laplacian(f);    // f'' + 2f'/r = 6
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double r = g.coord(0, static_cast<int>(n));
    CHECK(divv[n] == doctest::Approx(4.0 * r).epsilon(1e-11));
    CHECK(lapf[n] == doctest::Approx(6.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(fields::laplacian(v), std::invalid_argument);
}

TEST_CASE("gaussian osmotic velocity converges at second order") {
  const double beta = 0.5, s2 = 0.64;
  auto err = [&](int n) {
    Grid g = line(n, -2.0, 2.0, Boundary::DirichletZero);
    ScalarField rho(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coord(0, static_cast<int>(i));
      rho[i] = std::exp(-x * x / s2);
    }
    const VectorField u = fields::osmotic_velocity(rho, beta);
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coord(0, static_cast<int>(i));
      m = std::max(m, std::abs(u.comp(i, 0) + 2.0 * beta * x / s2));
    }
    return m;
  };
  const double e0 = err(101), e1 = err(201), e2 = err(401);
  CHECK(std::log2(e0 / e1) > 1.9);
  CHECK(std::log2(e1 / e2) > 1.9);
}

TEST_CASE("periodic stencils wrap") {
  const int n = 64;
  const double L = 2.0;
  Grid g({n}, {L / n}, {0.0}, Boundary::Periodic);
  ScalarField f(g);
  const double k = 2.0 * kPi / L;
  for (int i = 0; i < n; ++i) f[i] = std::sin(k * g.coord(0, i));
  const VectorField grad = fields::gradient(f);
  const double h = L / n;
  const double tol = k * k * k * h * h;  // third-derivative bound
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(grad.comp(i, 0) - k * std::cos(k * g.coord(0, i))) < tol);
}

TEST_CASE("phase gradient reads plane waves exactly") {
  const int n = 48;
  const double L = 4.0;
  const double k = 2.0 * kPi * 3.0 / L;
  Grid per({n}, {L / n}, {0.0}, Boundary::Periodic);
  WaveFunction psi(per, 1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const double x = per.coord(0, i);
    psi[i] = std::polar(1.0, k * x);
  }
  const VectorField grad = fields::phase_gradient(psi);
  for (int i = 0; i < n; ++i)
    CHECK(grad.comp(i, 0) == doctest::Approx(k).epsilon(1e-12));

  Grid open({30}, {0.1}, {0.0}, Boundary::DirichletZero);
  WaveFunction chi(open, 1.0, 1.0);
  for (int i = 0; i < 30; ++i) chi[i] = std::polar(2.0, 5.0 * open.coord(0, i));
  const VectorField grad2 = fields::phase_gradient(chi);
  for (int i = 0; i < 30; ++i)
    CHECK(grad2.comp(i, 0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("phase unwrap crosses branch cuts") {
  Grid g({20, 25}, {0.11, 0.09}, {0.0, 0.0}, Boundary::DirichletZero);
  WaveFunction psi(g, 1.0, 1.0);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Vec3 p = g.coords(i);
    psi[i] = std::polar(1.5, 2.0 * p.x + 3.0 * p.y);
  }
  const auto pa = fields::phase_and_amplitude(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Vec3 p = g.coords(i);
    CHECK(pa.phase[i] - pa.phase[0] ==
          doctest::Approx(2.0 * p.x + 3.0 * p.y).epsilon(1e-10));
    CHECK(pa.logAmplitude[i] == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  }
}

TEST_CASE("osmotic velocity floors vanishing density") {
  Grid g = line(201, -10.0, 10.0, Boundary::DirichletZero);
  ScalarField rho(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, static_cast<int>(i));
    rho[i] = std::exp(-x * x);
  }
  const VectorField u = fields::osmotic_velocity(rho, 1.0);
  CHECK(std::isfinite(u.max_node_norm()));
  CHECK(std::abs(u.comp(0, 0)) < 1e-20);  // floored tail, not -2x

  ScalarField zero(g, 0.0);
  CHECK_THROWS_AS(fields::osmotic_velocity(zero, 1.0), std::invalid_argument);
}

TEST_CASE("spin drift follows the density gradient") {
  Grid g({5, 5, 5}, {0.1, 0.1, 0.1}, {-0.2, -0.2, -0.2}, Boundary::DirichletZero);
  ScalarField rho(g);
  for (std::size_t n = 0; n < g.size(); ++n) rho[n] = 2.0 + 0.5 * g.coords(n).x;
  const double mass = 2.0, hbar = 3.0;
  const Vec3 axis{0.0, 0.0, 1.0};
  const auto dp = fields::spin_drift(rho, axis, mass, hbar);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double lg = 0.5 / rho[n];
    const Vec3 want = (hbar / (2.0 * mass)) * cross(Vec3{lg, 0.0, 0.0}, axis);
    CHECK(dp.forward.comp(n, 0) == doctest::Approx(want.x).epsilon(1e-12));
    CHECK(dp.forward.comp(n, 1) == doctest::Approx(want.y).epsilon(1e-12));
    CHECK(dp.forward.comp(n, 2) == doctest::Approx(want.z).epsilon(1e-12));
    for (int c = 0; c < 3; ++c)
      CHECK(dp.backward.comp(n, c) == -dp.forward.comp(n, c));
  }

  Grid flat({5, 5}, {0.1, 0.1}, {0.0, 0.0}, Boundary::DirichletZero);
  CHECK_THROWS_AS(fields::spin_drift(ScalarField(flat, 1.0), axis, mass, hbar),
                  std::invalid_argument);
  CHECK_THROWS_AS(fields::spin_drift(rho, Vec3{0.9, 0.0, 0.0}, mass, hbar),
                  std::invalid_argument);
}

TEST_CASE("spin current density flips with the sign convention") {
  Grid g({4, 4, 4}, {0.2, 0.2, 0.2}, {0.0, 0.0, 0.0}, Boundary::Periodic);
  ScalarField rho = testutil::random_density(g, 5);
  VectorField v(g);
  for (std::size_t n = 0; n < g.size(); ++n) v.set_vec(n, Vec3{0.3, -0.1, 0.2});
  const Vec3 axis{0.0, 1.0, 0.0};
  const VectorField plus = fields::spin_current_density(rho, axis, v, 1.5, 2.0, 1);
  const VectorField minus = fields::spin_current_density(rho, axis, v, 1.5, 2.0, -1);
  for (std::size_t n = 0; n < g.size(); ++n) {
    for (int c = 0; c < 3; ++c) {
      const double sym = plus.comp(n, c) + minus.comp(n, c);
      CHECK(sym == doctest::Approx(2.0 * rho[n] * v.comp(n, c)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(fields::spin_current_density(rho, axis, v, 1.5, 2.0, 2),
                  std::invalid_argument);
}

TEST_CASE("cross-product identity residual detects non-orthogonality") {
  CHECK(fields::clifford_identity_residual({2.0, 0.0, 0.0}, {0.0, 3.0, 0.0}) <
        1e-12);
  CHECK(fields::clifford_identity_residual({1.0, 1.0, 0.0}, {-2.0, 2.0, 0.0}) <
        1e-12);
  const Vec3 a{1.0, 2.0, 3.0};
  CHECK(fields::clifford_identity_residual(a, 2.0 * a) ==
        doctest::Approx(norm2(a) * norm2(2.0 * a)).epsilon(1e-12));
}

TEST_CASE("transition velocity and drift assembly") {
  Grid g = line(41, -1.0, 1.0, Boundary::DirichletZero);
  ScalarField S(g);
  VectorField v(g), u(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    S[i] = 4.0 * g.coord(0, static_cast<int>(i));
    v.comp(i, 0) = 0.25;
    u.comp(i, 0) = -0.5 * g.coord(0, static_cast<int>(i));
  }
  const double mass = 2.0, hbar = 1.0;
  const VectorField ups = fields::transition_velocity(S, v, mass, hbar);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(ups.comp(i, 0) == doctest::Approx(hbar / mass * 4.0 - 0.25).epsilon(1e-12));

  const auto dp = fields::drift_fields(ups, u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(dp.forward.comp(i, 0) == ups.comp(i, 0) + u.comp(i, 0));
    CHECK(dp.backward.comp(i, 0) == ups.comp(i, 0) - u.comp(i, 0));
  }
}

TEST_CASE("densities derived from a wave function") {
  Grid g = line(11, 0.0, 1.0, Boundary::DirichletZero);
  WaveFunction psi(g, 1.0, 1.0);
  for (std::size_t i = 0; i < psi.size(); ++i)
    psi[i] = {0.5 * static_cast<double>(i), 0.25};
  const ScalarField rho = fields::density_from_wavefunction(psi);
  for (std::size_t i = 0; i < psi.size(); ++i)
    CHECK(rho[i] == doctest::Approx(std::norm(psi[i])).epsilon(1e-15));
  const ScalarField q = fields::charge_mass_density(rho, -3.0);
  for (std::size_t i = 0; i < psi.size(); ++i)
    CHECK(q[i] == doctest::Approx(-3.0 * rho[i]).epsilon(1e-15));
}
