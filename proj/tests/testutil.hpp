#pragma once
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "zitter/grid.hpp"
#include "zitter/rng.hpp"

namespace testutil {

// Fresh directory under the system temp root; unique per call.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("zitter_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream os(p);
  os << s;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Smooth, strictly positive periodic density built from a few Fourier modes.
inline zitter::ScalarField random_density(const zitter::Grid& g,
                                          std::uint64_t seed) {
  zitter::rng::NormalStream ns(seed, 0);
  zitter::ScalarField rho(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto ijk = g.unpack(n);
    double s = 0.0;
    int slot = 0;
    for (int a = 0; a < g.dim(); ++a) {
      const double x = static_cast<double>(ijk[a]) / g.extent(a);
      for (int m = 1; m <= 2; ++m) {
        const double amp = 0.3 * ns.normal(0, slot);
        const double ph = zitter::kPi * ns.normal(0, slot + 1);
        s += amp * std::cos(2.0 * zitter::kPi * m * x + ph);
        slot += 2;
      }
    }
    rho[n] = std::exp(s);
  }
  return rho;
}

// Smooth periodic vector field from low Fourier modes.
inline zitter::VectorField random_drift(const zitter::Grid& g,
                                        std::uint64_t seed) {
  zitter::rng::NormalStream ns(seed, 1);
  zitter::VectorField v(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto ijk = g.unpack(n);
    for (int c = 0; c < g.dim(); ++c) {
      double s = 0.0;
      int slot = 8 * c;
      for (int a = 0; a < g.dim(); ++a) {
        const double x = static_cast<double>(ijk[a]) / g.extent(a);
        s += ns.normal(1, slot) *
             std::sin(2.0 * zitter::kPi * x + ns.normal(1, slot + 1));
        slot += 2;
      }
      v.comp(n, c) = s;
    }
  }
  return v;
}

}  // namespace testutil
