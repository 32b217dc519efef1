#include "zitter/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zitter::fp {
namespace {

std::size_t axis_stride(const Grid& g, int axis) {
  switch (axis) {
    case 0: return static_cast<std::size_t>(g.extent(1)) * g.extent(2);
    case 1: return g.extent(2);
    default: return 1;
  }
}

// Neighbour value with boundary semantics: periodic wraps, dirichlet reads 0
// outside, reflecting mirrors (sign < 0 flips the mirrored value, used for
// normal components of fluxes).
double neighbour(const Grid& g, const std::vector<double>& f, std::size_t node,
                 int axis, int dir, double mirrorSign) {
  const int n = g.extent(axis);
  const int i = g.unpack(node)[axis];
  const std::size_t stride = axis_stride(g, axis);
  const int j = i + dir;
  if (j >= 0 && j < n) return f[node + dir * static_cast<std::ptrdiff_t>(stride)];
  switch (g.boundary()) {
    case Boundary::Periodic: {
      const int w = j < 0 ? j + n : j - n;
      return f[node + (w - i) * static_cast<std::ptrdiff_t>(stride)];
    }
    case Boundary::DirichletZero:
      return 0.0;
    case Boundary::Reflecting: {
      const int m = j < 0 ? -j : 2 * n - 2 - j;  // mirror about the edge node
      return mirrorSign * f[node + (m - i) * static_cast<std::ptrdiff_t>(stride)];
    }
  }
  return 0.0;
}

void central_diff(const Grid& g, const std::vector<double>& f, int axis,
                  double mirrorSign, std::vector<double>& out, bool accumulate) {
  const double inv2h = 1.0 / (2.0 * g.spacing(axis));
  for (std::size_t node = 0; node < g.size(); ++node) {
    const double d = (neighbour(g, f, node, axis, +1, mirrorSign) -
                      neighbour(g, f, node, axis, -1, mirrorSign)) * inv2h;
    if (accumulate) out[node] += d;
    else out[node] = d;
  }
}

}  // namespace

VectorField gradc(const ScalarField& f) {
  const Grid& g = f.grid();
  require(!g.radial(), "fp: cartesian grids only");
  VectorField out(g);
  std::vector<double> comp(g.size());
  for (int a = 0; a < g.dim(); ++a) {
    central_diff(g, f.values(), a, 1.0, comp, false);
    for (std::size_t n = 0; n < g.size(); ++n) out.comp(n, a) = comp[n];
  }
  return out;
}

ScalarField divc(const VectorField& v) {
  const Grid& g = v.grid();
  require(!g.radial(), "fp: cartesian grids only");
  ScalarField out(g);
  std::vector<double> comp(g.size());
  for (int a = 0; a < g.dim(); ++a) {
    for (std::size_t n = 0; n < g.size(); ++n) comp[n] = v.comp(n, a);
    // Normal components mirror with a sign flip so reflected fluxes cancel.
    central_diff(g, comp, a, -1.0, out.values(), true);
  }
  return out;
}

ScalarField lapc(const ScalarField& f) { return divc(gradc(f)); }

namespace {

ScalarField advective_divergence(const State& s, bool upwind) {
  const Grid& g = s.rho.grid();
  if (!upwind) {
    VectorField flux(g);
    for (std::size_t n = 0; n < g.size(); ++n)
      for (int c = 0; c < g.dim(); ++c)
        flux.comp(n, c) = s.drift.comp(n, c) * s.rho[n];
    return divc(flux);
  }
  // Donor-cell upwinding, first order.
  ScalarField out(g);
  std::vector<double> flux(g.size());
  for (int a = 0; a < g.dim(); ++a) {
    const double invh = 1.0 / g.spacing(a);
    for (std::size_t n = 0; n < g.size(); ++n) flux[n] = s.drift.comp(n, a) * s.rho[n];
    for (std::size_t n = 0; n < g.size(); ++n) {
      const double d =
          s.drift.comp(n, a) >= 0.0
              ? flux[n] - neighbour(g, flux, n, a, -1, -1.0)
              : neighbour(g, flux, n, a, +1, -1.0) - flux[n];
      out[n] += d * invh;
    }
  }
  return out;
}

}  // namespace

ScalarField rhs_forward(const State& s, bool upwind) {
  require_same_grid(s.rho.grid(), s.drift.grid(), "fp::rhs_forward");
  ScalarField adv = advective_divergence(s, upwind);
  ScalarField lap = lapc(s.rho);
  ScalarField out(s.rho.grid());
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = -adv[n] + s.beta * lap[n];
  return out;
}

ScalarField rhs_backward(const State& s, bool upwind) {
  require_same_grid(s.rho.grid(), s.drift.grid(), "fp::rhs_backward");
  ScalarField adv = advective_divergence(s, upwind);
  ScalarField lap = lapc(s.rho);
  ScalarField out(s.rho.grid());
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = -adv[n] - s.beta * lap[n];
  return out;
}

double stable_dt(const State& s) {
  const Grid& g = s.rho.grid();
  double bound = std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.dim(); ++a) {
    const double h = g.spacing(a);
    if (s.beta > 0.0)
      bound = std::min(bound, h * h / (2.0 * g.dim() * s.beta));
  }
  const double vmax = s.drift.max_node_norm();
  if (vmax > 0.0) bound = std::min(bound, g.min_spacing() / vmax);
  require(std::isfinite(bound), "fp::stable_dt: no diffusion and no drift");
  return 0.9 * bound;
}

namespace {

State step_impl(const State& s, double dt, bool upwind, bool forward,
                StepDiagnostics* diag) {
  require(dt > 0.0, "fp step: dt must be > 0");
  const double maxDt = stable_dt(s);
  if (dt > maxDt)
    throw std::invalid_argument("fp step: dt " + std::to_string(dt) +
                                " exceeds stability bound " + std::to_string(maxDt));
  ScalarField rhs = forward ? rhs_forward(s, upwind) : rhs_backward(s, upwind);
  State out = s;
  out.t = s.t + dt;
  double minRho = std::numeric_limits<double>::infinity();
  int clipped = 0;
  for (std::size_t n = 0; n < out.rho.size(); ++n) {
    double r = s.rho[n] + dt * rhs[n];
    minRho = std::min(minRho, r);
    if (r < 0.0) {
      r = 0.0;
      ++clipped;
    }
    out.rho[n] = r;
  }
  if (diag) {
    diag->massBefore = integrate(s.rho);
    diag->massAfter = integrate(out.rho);
    diag->minRho = minRho;
    diag->clippedNodes = clipped;
  }
  return out;
}

}  // namespace

State forward_step(const State& s, double dt, bool upwind, StepDiagnostics* diag) {
  return step_impl(s, dt, upwind, true, diag);
}

State backward_step(const State& s, double dt, bool upwind, StepDiagnostics* diag) {
  return step_impl(s, dt, upwind, false, diag);
}

ScalarField continuity_residual(const ScalarField& rhoA, const ScalarField& rhoB,
                                double dt, const VectorField& upsilon,
                                const VectorField& v) {
  require_same_grid(rhoA.grid(), rhoB.grid(), "fp::continuity_residual");
  require_same_grid(rhoA.grid(), upsilon.grid(), "fp::continuity_residual");
  require_same_grid(rhoA.grid(), v.grid(), "fp::continuity_residual");
  require(dt > 0.0, "fp::continuity_residual: dt must be > 0");
  const Grid& g = rhoA.grid();
  VectorField flux(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double mid = 0.5 * (rhoA[n] + rhoB[n]);
    for (int c = 0; c < g.dim(); ++c)
      flux.comp(n, c) = (upsilon.comp(n, c) + v.comp(n, c)) * mid;
  }
  ScalarField div = divc(flux);
  ScalarField out(g);
  for (std::size_t n = 0; n < g.size(); ++n)
    out[n] = (rhoB[n] - rhoA[n]) / dt + div[n];
  return out;
}

ScalarField stationarity_residual(const VectorField& u, const ScalarField& V,
                                  double E0, double mass, double hbar) {
  require_same_grid(u.grid(), V.grid(), "fp::stationarity_residual");
  require(mass > 0.0 && hbar > 0.0, "fp::stationarity_residual: mass, hbar > 0");
  ScalarField div = fields::divergence(u);
  ScalarField out(u.grid());
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = E0 / mass + (hbar / (2.0 * mass)) * div[n] +
             0.5 * norm2(u.vec(n)) - V[n] / mass;
  return out;
}

CoupledResiduals coupled_field_residuals(const TimePair<VectorField>& u,
                                         const TimePair<VectorField>& upsilon,
                                         const VectorField& v,
                                         const ScalarField& V,
                                         const VectorField* fExt, double mass,
                                         double hbar) {
  const Grid& g = v.grid();
  require(u.dt > 0.0 && u.dt == upsilon.dt, "fp::coupled_field_residuals: pair dts");
  require_same_grid(u.earlier.grid(), g, "fp::coupled_field_residuals");
  require_same_grid(V.grid(), g, "fp::coupled_field_residuals");
  const double betaH = hbar / (2.0 * mass);

  VectorField uMid(g), totMid(g);
  for (std::size_t i = 0; i < uMid.values().size(); ++i) {
    uMid.values()[i] = 0.5 * (u.earlier.values()[i] + u.later.values()[i]);
    totMid.values()[i] =
        0.5 * (upsilon.earlier.values()[i] + upsilon.later.values()[i]) + v.values()[i];
  }

  // du/dt + beta grad(div(upsilon + v)) + grad(u . (upsilon + v)) = 0
  ScalarField divTot = fields::divergence(totMid);
  VectorField gradDiv = fields::gradient(divTot);
  ScalarField uDotTot(g);
  for (std::size_t n = 0; n < g.size(); ++n)
    uDotTot[n] = dot(uMid.vec(n), totMid.vec(n));
  VectorField gradDot = fields::gradient(uDotTot);
  CoupledResiduals res{VectorField(g), VectorField(g)};
  for (std::size_t i = 0; i < res.osmotic.values().size(); ++i)
    res.osmotic.values()[i] =
        (u.later.values()[i] - u.earlier.values()[i]) / u.dt +
        betaH * gradDiv.values()[i] + gradDot.values()[i];

  // d(upsilon + v)/dt + grad(V)/m - fExt/m + (upsilon.grad)(upsilon + v)
  //   - (u.grad)u - beta lap(u) = 0
  VectorField gradV = fields::gradient(V);
  VectorField lapU = fields::laplacian(uMid);
  VectorField upsMid(g);
  for (std::size_t i = 0; i < upsMid.values().size(); ++i)
    upsMid.values()[i] = 0.5 * (upsilon.earlier.values()[i] + upsilon.later.values()[i]);
  // advection terms
  auto advect = [&g](const VectorField& a, const VectorField& f) {
    VectorField out(g);
    for (int c = 0; c < g.dim(); ++c) {
      ScalarField fc(g);
      for (std::size_t n = 0; n < g.size(); ++n) fc[n] = f.comp(n, c);
      VectorField gc = fields::gradient(fc);
      for (std::size_t n = 0; n < g.size(); ++n)
        out.comp(n, c) = dot(a.vec(n), gc.vec(n));
    }
    return out;
  };
  VectorField advTot = advect(upsMid, totMid);
  VectorField advU = advect(uMid, uMid);
  for (std::size_t i = 0; i < res.current.values().size(); ++i) {
    double r = (upsilon.later.values()[i] - upsilon.earlier.values()[i]) / upsilon.dt +
               gradV.values()[i] / mass + advTot.values()[i] - advU.values()[i] -
               betaH * lapU.values()[i];
    if (fExt) r -= fExt->values()[i] / mass;
    res.current.values()[i] = r;
  }
  return res;
}

}  // namespace zitter::fp
