#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>

#include "testutil.hpp"
#include "zitter/grid.hpp"
#include "zitter/io.hpp"
#include "zitter/rng.hpp"

using namespace zitter;

TEST_CASE("grid indexing and coordinates round-trip") {
  Grid g({4, 5, 6}, {0.1, 0.2, 0.3}, {-1.0, 0.0, 2.0}, Boundary::DirichletZero);
  CHECK(g.dim() == 3);
  CHECK(g.size() == 120);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto ijk = g.unpack(n);
    CHECK(g.index(ijk[0], ijk[1], ijk[2]) == n);
  }
  CHECK(g.coord(0, 3) == doctest::Approx(-0.7).epsilon(1e-15));
  const Vec3 p = g.coords(g.index(1, 2, 3));
  CHECK(p.x == doctest::Approx(-0.9));
  CHECK(p.y == doctest::Approx(0.4));
  CHECK(p.z == doctest::Approx(2.9));
  CHECK(g.min_spacing() == 0.1);
  CHECK(g.max_spacing() == 0.3);
}

TEST_CASE("grid weights and integration") {
  Grid cart({4, 5}, {0.1, 0.2}, {0.0, 0.0}, Boundary::Periodic);
  CHECK(cart.cell_volume() == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(cart.weight(7) == cart.cell_volume());
  ScalarField ones(cart, 1.0);
  CHECK(integrate(ones) == doctest::Approx(20 * 0.02).epsilon(1e-14));

  Grid rad({5}, {0.1}, {0.1}, Boundary::DirichletZero, Geometry::RadialSpherical);
  CHECK(rad.radial());
  for (int i = 0; i < 5; ++i) {
    const double r = 0.1 + 0.1 * i;
    CHECK(rad.weight(i) == doctest::Approx(4.0 * kPi * r * r * 0.1).epsilon(1e-15));
  }
}

TEST_CASE("grid equality compares every description") {
  Grid a({8}, {0.5}, {-2.0}, Boundary::Periodic);
  Grid b({8}, {0.5}, {-2.0}, Boundary::Periodic);
  CHECK(a == b);
  CHECK(a != Grid({8}, {0.25}, {-2.0}, Boundary::Periodic));
  CHECK(a != Grid({8}, {0.5}, {-1.0}, Boundary::Periodic));
  CHECK(a != Grid({8}, {0.5}, {-2.0}, Boundary::DirichletZero));
  CHECK(a != Grid({9}, {0.5}, {-2.0}, Boundary::Periodic));
}

TEST_CASE("grid construction rejects bad shapes") {
  CHECK_THROWS_AS(Grid({2}, {0.1}, {0.0}, Boundary::Periodic), std::invalid_argument);
  CHECK_THROWS_AS(Grid({4}, {0.0}, {0.0}, Boundary::Periodic), std::invalid_argument);
  CHECK_THROWS_AS(Grid({4}, {-0.1}, {0.0}, Boundary::Periodic), std::invalid_argument);
  CHECK_THROWS_AS(Grid({4, 4}, {0.1}, {0.0}, Boundary::Periodic), std::invalid_argument);
  CHECK_THROWS_AS(Grid({4, 4}, {0.1, 0.1}, {0.0, 0.0}, Boundary::DirichletZero,
                       Geometry::RadialSpherical),
                  std::invalid_argument);
  CHECK_THROWS_AS(Grid({4}, {0.1}, {0.0}, Boundary::DirichletZero,
                       Geometry::RadialSpherical),
                  std::invalid_argument);
}

TEST_CASE("boundary and geometry names round-trip") {
  for (Boundary b : {Boundary::DirichletZero, Boundary::Reflecting, Boundary::Periodic})
    CHECK(boundary_from_string(to_string(b)) == b);
  for (Geometry ge : {Geometry::Cartesian, Geometry::RadialSpherical})
    CHECK(geometry_from_string(to_string(ge)) == ge);
  CHECK_THROWS_AS(boundary_from_string("open"), std::invalid_argument);
  CHECK_THROWS_AS(geometry_from_string("toroidal"), std::invalid_argument);
}

TEST_CASE("pairwise summation matches long-double accumulation") {
  rng::NormalStream ns(99, 0);
  std::vector<double> v(100000);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = ns.normal(static_cast<std::uint32_t>(i), 0);
    acc += v[i];
  }
  const double s = pairwise_sum(v);
  CHECK(std::abs(s - static_cast<double>(acc)) <= 1e-10 * v.size());
  CHECK(pairwise_sum(v) == s);
}

TEST_CASE("wave function norm and normalization") {
  Grid g({201}, {0.05}, {-5.0}, Boundary::DirichletZero);
  WaveFunction psi(g, 1.0, 1.0);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double x = g.coord(0, static_cast<int>(i));
    psi[i] = std::exp(-0.5 * x * x);
  }
  CHECK_THROWS_AS(psi.check_normalized(1e-6), std::invalid_argument);
  psi.normalize();
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-13));
  psi.check_normalized(1e-12);
  CHECK(psi.beta() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("scalar field text round-trip is bit exact") {
  Grid g({5, 4}, {0.1, 1.0 / 3.0}, {-0.7, 2.0}, Boundary::Reflecting);
  ScalarField f(g);
  rng::NormalStream ns(7, 0);
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = std::exp(3.0 * ns.normal(static_cast<std::uint32_t>(i), 0));
  f[3] = 1e-300;
  f[4] = -0.1;

  std::ostringstream os;
  io::write_field(os, f);
  std::istringstream is(os.str());
  const auto any = io::read_field(is);
  const auto& back = std::get<ScalarField>(any);
  CHECK(back.grid() == g);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);
}

TEST_CASE("vector and wave round-trips preserve everything") {
  Grid g({3, 3, 4}, {0.2, 0.3, 0.4}, {0.0, -1.0, 1.0}, Boundary::Periodic);
  VectorField v(g);
  rng::NormalStream ns(11, 0);
  for (std::size_t i = 0; i < v.values().size(); ++i)
    v.values()[i] = ns.normal(static_cast<std::uint32_t>(i), 1);
  std::ostringstream vs;
  io::write_field(vs, v);
  std::istringstream vr(vs.str());
  const auto vAny = io::read_field(vr);
  const auto& vBack = std::get<VectorField>(vAny);
  CHECK(vBack.grid() == g);
  CHECK(vBack.values() == v.values());

  WaveFunction w(g, 9.10938e-31, 1.0545718e-34);
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = {ns.normal(static_cast<std::uint32_t>(i), 2),
            ns.normal(static_cast<std::uint32_t>(i), 3)};
  std::ostringstream ws;
  io::write_field(ws, w);
  std::istringstream wr(ws.str());
  const auto wAny = io::read_field(wr);
  const auto& wBack = std::get<WaveFunction>(wAny);
  CHECK(wBack.grid() == g);
  CHECK(wBack.mass() == w.mass());
  CHECK(wBack.hbar() == w.hbar());
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(wBack[i] == w[i]);
}

TEST_CASE("file save and load with type guards") {
  const auto dir = testutil::temp_dir("io");
  Grid g({6}, {0.25}, {0.0}, Boundary::DirichletZero);
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.1 * static_cast<double>(i);
  const auto path = (dir / "f.zf").string();
  io::save_field(path, f);
  const ScalarField back = io::load_scalar(path);
  CHECK(back.values() == f.values());

  VectorField v(g);
  const auto vpath = (dir / "v.zf").string();
  io::save_field(vpath, v);
  CHECK_THROWS_WITH_AS(io::load_scalar(vpath),
                       (vpath + ": expected a scalar field").c_str(),
                       std::runtime_error);
  CHECK_THROWS_AS(io::load_field((dir / "absent.zf").string()), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("reader failure modes name the offending token") {
  auto read = [](const std::string& text) {
    std::istringstream is(text);
    return io::read_field(is, "buf");
  };
  CHECK_THROWS_WITH_AS(read("zspam scalar"), "buf: not a zfield file (bad magic)",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(read("zfield tensor cartesian periodic 1 4 0.1 0"),
                       "buf: unknown field kind 'tensor'", std::runtime_error);
  CHECK_THROWS_WITH_AS(read("zfield scalar cartesian periodic 1 4 0.1"),
                       "buf: missing origin (token 8)", std::runtime_error);
  CHECK_THROWS_WITH_AS(read("zfield scalar cartesian periodic 1 4 abc 0 1 2 3 4"),
                       "buf: non-numeric spacing 'abc' (token 7)", std::runtime_error);
  CHECK_THROWS_AS(read("zfield scalar cartesian open 1 4 0.1 0 1 2 3 4"),
                  std::runtime_error);
  CHECK_THROWS_AS(read("zfield scalar cartesian periodic 4 4 4 4 4"),
                  std::runtime_error);
}

TEST_CASE("csv emission lists coordinates then values") {
  Grid g({3}, {0.5}, {1.0}, Boundary::DirichletZero, Geometry::RadialSpherical);
  ScalarField f(g);
  f[0] = 1.0;
  f[1] = 2.0;
  f[2] = 3.0;
  const std::string csv = io::field_csv(f);
  CHECK(csv.substr(0, csv.find('\n')) == "r,value");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  Grid g2({3, 3}, {0.5, 0.5}, {0.0, 0.0}, Boundary::Periodic);
  VectorField v(g2);
  const std::string vcsv = io::field_csv(v);
  CHECK(vcsv.substr(0, vcsv.find('\n')) == "x0,x1,v0,v1");
  CHECK(std::count(vcsv.begin(), vcsv.end(), '\n') == 10);
}

TEST_CASE("formatting round-trips doubles through text") {
  const double cases[] = {0.0,
                          0.1,
                          -1.0 / 3.0,
                          kPi,
                          1e-300,
                          std::numeric_limits<double>::denorm_min(),
                          std::numeric_limits<double>::max(),
                          5.7884e-5};
  for (double v : cases) {
    const std::string s = io::fmt(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}
