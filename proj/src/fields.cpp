#include "zitter/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zitter::fields {
namespace {

// Strides for walking one axis of a row-major (i,j,k) block.
std::size_t axis_stride(const Grid& g, int axis) {
  switch (axis) {
    case 0: return static_cast<std::size_t>(g.extent(1)) * g.extent(2);
    case 1: return g.extent(2);
    default: return 1;
  }
}

// First derivative of `src` along `axis`, written through `put(node, value)`.
template <typename Put>
void diff_axis(const Grid& g, const std::vector<double>& src, int axis, Put put) {
  const int n = g.extent(axis);
  const double h = g.spacing(axis);
  const std::size_t stride = axis_stride(g, axis);
  const bool periodic = g.boundary() == Boundary::Periodic;
  for (std::size_t node = 0; node < g.size(); ++node) {
    const int i = g.unpack(node)[axis];
    double d;
    if (i > 0 && i < n - 1) {
      d = (src[node + stride] - src[node - stride]) / (2.0 * h);
    } else if (periodic) {
      const std::size_t up = i == n - 1 ? node - (n - 1) * stride : node + stride;
      const std::size_t dn = i == 0 ? node + (n - 1) * stride : node - stride;
      d = (src[up] - src[dn]) / (2.0 * h);
    } else if (i == 0) {
      d = (-3.0 * src[node] + 4.0 * src[node + stride] - src[node + 2 * stride]) /
          (2.0 * h);
    } else {
      d = (3.0 * src[node] - 4.0 * src[node - stride] + src[node - 2 * stride]) /
          (2.0 * h);
    }
    put(node, d);
  }
}

// Second derivative along one axis; shifted three-point stencil at
// non-periodic edges (first-order there, second-order inside).
template <typename Put>
void diff2_axis(const Grid& g, const std::vector<double>& src, int axis, Put put) {
  const int n = g.extent(axis);
  const double h2 = g.spacing(axis) * g.spacing(axis);
  const std::size_t stride = axis_stride(g, axis);
  const bool periodic = g.boundary() == Boundary::Periodic;
  for (std::size_t node = 0; node < g.size(); ++node) {
    const int i = g.unpack(node)[axis];
    double d;
    if (i > 0 && i < n - 1) {
      d = (src[node + stride] - 2.0 * src[node] + src[node - stride]) / h2;
    } else if (periodic) {
      const std::size_t up = i == n - 1 ? node - (n - 1) * stride : node + stride;
      const std::size_t dn = i == 0 ? node + (n - 1) * stride : node - stride;
      d = (src[up] - 2.0 * src[node] + src[dn]) / h2;
    } else if (i == 0) {
      d = (src[node] - 2.0 * src[node + stride] + src[node + 2 * stride]) / h2;
    } else {
      d = (src[node] - 2.0 * src[node - stride] + src[node - 2 * stride]) / h2;
    }
    put(node, d);
  }
}

std::vector<double> component(const VectorField& v, int c) {
  std::vector<double> out(v.grid().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v.comp(i, c);
  return out;
}

double wrap_to_pi(double d) {
  return d - 2.0 * kPi * std::round(d / (2.0 * kPi));
}

VectorField log_gradient(const ScalarField& rho, double floorFrac) {
  require(floorFrac >= 0.0, "osmotic floor must be >= 0");
  const double floor = floorFrac * rho.max_abs();
  VectorField g = gradient(rho);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double denom = std::max(rho[i], floor);
    require(denom > 0.0, "log_gradient: density not positive anywhere");
    for (int c = 0; c < g.comps(); ++c) g.comp(i, c) /= denom;
  }
  return g;
}

}  // namespace

VectorField gradient(const ScalarField& f) {
  VectorField out(f.grid());
  const Grid& g = f.grid();
  for (int a = 0; a < g.dim(); ++a)
    diff_axis(g, f.values(), a, [&](std::size_t n, double d) { out.comp(n, a) = d; });
  return out;
}

ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(g);
  for (int a = 0; a < g.dim(); ++a) {
    auto comp_a = component(v, a);
    diff_axis(g, comp_a, a, [&](std::size_t n, double d) { out[n] += d; });
  }
  if (g.radial()) {
    for (std::size_t n = 0; n < g.size(); ++n)
      out[n] += 2.0 * v.comp(n, 0) / g.coord(0, static_cast<int>(n));
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int a = 0; a < g.dim(); ++a)
    diff2_axis(g, f.values(), a, [&](std::size_t n, double d) { out[n] += d; });
  if (g.radial()) {
    std::vector<double> d1(g.size());
    diff_axis(g, f.values(), 0, [&](std::size_t n, double d) { d1[n] = d; });
    for (std::size_t n = 0; n < g.size(); ++n)
      out[n] += 2.0 * d1[n] / g.coord(0, static_cast<int>(n));
  }
  return out;
}

VectorField laplacian(const VectorField& v) {
  const Grid& g = v.grid();
  require(!g.radial(), "vector laplacian: cartesian grids only");
  VectorField out(g);
  for (int c = 0; c < g.dim(); ++c) {
    auto comp_c = component(v, c);
    for (int a = 0; a < g.dim(); ++a)
      diff2_axis(g, comp_c, a, [&](std::size_t n, double d) { out.comp(n, c) += d; });
  }
  return out;
}

ScalarField density_from_wavefunction(const WaveFunction& psi) {
  ScalarField rho(psi.grid());
  for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
  return rho;
}

ScalarField charge_mass_density(const ScalarField& rho, double factor) {
  ScalarField out = rho;
  for (auto& x : out.values()) x *= factor;
  return out;
}

VectorField osmotic_velocity(const ScalarField& rho, double beta, double floorFrac) {
  VectorField u = log_gradient(rho, floorFrac);
  for (auto& x : u.values()) x *= beta;
  return u;
}

PhaseAmplitude phase_and_amplitude(const WaveFunction& psi) {
  const Grid& g = psi.grid();
  ScalarField R(g), S(g);
  double maxAbs = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    maxAbs = std::max(maxAbs, std::abs(psi[i]));
  require(maxAbs > 0.0, "phase_and_amplitude: zero state");
  // Relative floor keeps R finite at true nodes of psi without touching the
  // physically resolved range.
  double floor = maxAbs * 1.0e-150;
  if (floor == 0.0) floor = std::numeric_limits<double>::min();
  std::vector<double> raw(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    R[i] = std::log(std::max(std::abs(psi[i]), floor));
    raw[i] = std::arg(psi[i]);
  }
  // Axis-sequential unwrap: each node is chained to its predecessor along the
  // fastest axis with a nonzero index, falling back to slower axes at edges.
  for (std::size_t node = 0; node < g.size(); ++node) {
    if (node == 0) {
      S[0] = raw[0];
      continue;
    }
    const auto ijk = g.unpack(node);
    std::size_t ref = node;
    if (ijk[2] > 0) ref = node - axis_stride(g, 2);
    else if (ijk[1] > 0) ref = node - axis_stride(g, 1);
    else ref = node - axis_stride(g, 0);
    S[node] = S[ref] + wrap_to_pi(raw[node] - raw[ref]);
  }
  return {std::move(R), std::move(S)};
}

VectorField phase_gradient(const WaveFunction& psi) {
  const Grid& g = psi.grid();
  VectorField out(g);
  const bool periodic = g.boundary() == Boundary::Periodic;
  for (int a = 0; a < g.dim(); ++a) {
    const int n = g.extent(a);
    const double h = g.spacing(a);
    const std::size_t stride = axis_stride(g, a);
    for (std::size_t node = 0; node < g.size(); ++node) {
      const int i = g.unpack(node)[a];
      double d;
      if (i > 0 && i < n - 1) {
        d = std::arg(psi[node + stride] * std::conj(psi[node - stride])) / (2.0 * h);
      } else if (periodic) {
        const std::size_t up = i == n - 1 ? node - (n - 1) * stride : node + stride;
        const std::size_t dn = i == 0 ? node + (n - 1) * stride : node - stride;
        d = std::arg(psi[up] * std::conj(psi[dn])) / (2.0 * h);
      } else if (i == 0) {
        d = std::arg(psi[node + stride] * std::conj(psi[node])) / h;
      } else {
        d = std::arg(psi[node] * std::conj(psi[node - stride])) / h;
      }
      out.comp(node, a) = d;
    }
  }
  return out;
}

VectorField transition_velocity(const ScalarField& phase, const VectorField& v,
                                double mass, double hbar) {
  require_same_grid(phase.grid(), v.grid(), "transition_velocity");
  require(mass > 0.0 && hbar > 0.0, "transition_velocity: mass, hbar must be > 0");
  VectorField out = gradient(phase);
  const double s = hbar / mass;
  for (std::size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] = s * out.values()[i] - v.values()[i];
  return out;
}

DriftPair drift_fields(const VectorField& current, const VectorField& osmotic) {
  require_same_grid(current.grid(), osmotic.grid(), "drift_fields");
  VectorField b = current, bs = current;
  for (std::size_t i = 0; i < b.values().size(); ++i) {
    b.values()[i] += osmotic.values()[i];
    bs.values()[i] -= osmotic.values()[i];
  }
  return {std::move(b), std::move(bs)};
}

DriftPair spin_drift(const ScalarField& rho, const Vec3& axis, double mass,
                     double hbar, double floorFrac) {
  const Grid& g = rho.grid();
  require(g.dim() == 3 && !g.radial(), "spin_drift: 3-D cartesian grid required");
  require(std::abs(norm(axis) - 1.0) < 1.0e-12, "spin_drift: |axis| must be 1");
  VectorField lg = log_gradient(rho, floorFrac);
  VectorField b(g), bs(g);
  const double s = hbar / (2.0 * mass);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 w = s * cross(lg.vec(n), axis);
    b.set_vec(n, w);
    bs.set_vec(n, -w);
  }
  return {std::move(b), std::move(bs)};
}

VectorField spin_current_density(const ScalarField& rho, const Vec3& axis,
                                 const VectorField& v, double mass, double hbar,
                                 int sign, double floorFrac) {
  const Grid& g = rho.grid();
  require(g.dim() == 3 && !g.radial(), "spin_current_density: 3-D cartesian grid required");
  require_same_grid(g, v.grid(), "spin_current_density");
  require(sign == 1 || sign == -1, "spin_current_density: sign must be +/-1");
  require(std::abs(norm(axis) - 1.0) < 1.0e-12, "spin_current_density: |axis| must be 1");
  const Vec3 spin = (hbar / 2.0) * axis;
  VectorField lg = log_gradient(rho, floorFrac);
  VectorField J(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 w = static_cast<double>(sign) * (1.0 / mass) * cross(lg.vec(n), spin) + v.vec(n);
    J.set_vec(n, rho[n] * w);
  }
  return J;
}

double clifford_identity_residual(const Vec3& g, const Vec3& s) {
  return std::abs(norm2(cross(g, s)) - norm2(g) * norm2(s));
}

}  // namespace zitter::fields
