#include "zitter/schrodinger.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <complex>

namespace zitter::schrod {
namespace {

using Cplx = std::complex<double>;
using SpMatD = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<Cplx>;
using VecD = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;

std::size_t axis_stride(const Grid& g, int axis) {
  switch (axis) {
    case 0: return static_cast<std::size_t>(g.extent(1)) * g.extent(2);
    case 1: return g.extent(2);
    default: return 1;
  }
}

// Scale of one coefficient's weight in the solver space: radial problems are
// solved in u = r psi where the measure 4 pi r^2 dr becomes 4 pi dr.
double weight_unit(const Grid& g) {
  if (g.radial()) return 4.0 * kPi * g.spacing(0);
  return g.cell_volume();
}

void to_solver(const WaveFunction& psi, VecC& c) {
  const Grid& g = psi.grid();
  c.resize(static_cast<Eigen::Index>(g.size()));
  if (g.radial()) {
    for (std::size_t i = 0; i < g.size(); ++i)
      c[static_cast<Eigen::Index>(i)] = psi[i] * g.coord(0, static_cast<int>(i));
  } else {
    for (std::size_t i = 0; i < g.size(); ++i)
      c[static_cast<Eigen::Index>(i)] = psi[i];
  }
}

WaveFunction from_solver(const Grid& g, const VecC& c, double mass, double hbar) {
  std::vector<Cplx> psi(g.size());
  if (g.radial()) {
    for (std::size_t i = 0; i < g.size(); ++i)
      psi[i] = c[static_cast<Eigen::Index>(i)] / g.coord(0, static_cast<int>(i));
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) psi[i] = c[static_cast<Eigen::Index>(i)];
  }
  return WaveFunction(g, std::move(psi), mass, hbar);
}

double effective_potential(const HamiltonianSpec& spec, std::size_t node) {
  double v = spec.potential[node];
  if (spec.energyShift) v += *spec.energyShift;
  if (spec.scalarPotential) v += spec.charge * (*spec.scalarPotential)[node];
  return v;
}

// Assemble H in solver space. Real assembly requires no vector potential.
template <typename Scalar>
Eigen::SparseMatrix<Scalar> assemble(const HamiltonianSpec& spec, double extraShift) {
  const Grid& g = spec.potential.grid();
  const double kin = spec.hbar * spec.hbar / (2.0 * spec.mass);
  const auto n = static_cast<Eigen::Index>(g.size());
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(g.size() * (2 * g.dim() + 1));

  for (std::size_t node = 0; node < g.size(); ++node) {
    double diag = effective_potential(spec, node) + extraShift;
    for (int a = 0; a < g.dim(); ++a) diag += 2.0 * kin / (g.spacing(a) * g.spacing(a));
    trip.emplace_back(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(node),
                      Scalar(diag));
  }
  for (int a = 0; a < g.dim(); ++a) {
    const int na = g.extent(a);
    const double off = -kin / (g.spacing(a) * g.spacing(a));
    const std::size_t stride = axis_stride(g, a);
    for (std::size_t node = 0; node < g.size(); ++node) {
      const int i = g.unpack(node)[a];
      std::size_t up;
      if (i < na - 1) up = node + stride;
      else if (g.boundary() == Boundary::Periodic) up = node - static_cast<std::size_t>(na - 1) * stride;
      else continue;  // Dirichlet ghost
      Scalar fwd, bwd;
      if constexpr (std::is_same_v<Scalar, Cplx>) {
        double theta = 0.0;
        if (spec.vectorPotential) {
          const double aFace = 0.5 * (spec.vectorPotential->comp(node, a) +
                                      spec.vectorPotential->comp(up, a));
          theta = spec.charge * g.spacing(a) * aFace / (spec.hbar * spec.lightSpeed);
        }
        fwd = off * std::exp(Cplx(0.0, theta));
        bwd = off * std::exp(Cplx(0.0, -theta));
      } else {
        fwd = off;
        bwd = off;
      }
      trip.emplace_back(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(up), fwd);
      trip.emplace_back(static_cast<Eigen::Index>(up), static_cast<Eigen::Index>(node), bwd);
    }
  }
  Eigen::SparseMatrix<Scalar> H(n, n);
  H.setFromTriplets(trip.begin(), trip.end());
  H.makeCompressed();
  return H;
}

double operator_scale(const SpMatD& H) {
  double s = 0.0;
  for (int c = 0; c < H.outerSize(); ++c) {
    double row = 0.0;
    for (SpMatD::InnerIterator it(H, c); it; ++it) row += std::abs(it.value());
    s = std::max(s, row);
  }
  return s;
}

struct CoarsePlan {
  Grid grid;
  std::array<int, 3> stride;
  std::array<int, 3> offset;
};

// Sample every stride-th node until the dense eigensolver is affordable.
CoarsePlan coarsen(const Grid& g, std::size_t target) {
  std::array<int, 3> s = {1, 1, 1};
  std::array<int, 3> nc = {1, 1, 1};
  for (int a = 0; a < g.dim(); ++a) nc[a] = g.extent(a);
  auto total = [&] {
    std::size_t t = 1;
    for (int a = 0; a < g.dim(); ++a) t *= nc[a];
    return t;
  };
  bool progress = true;
  while (total() > target && progress) {
    progress = false;
    int pick = -1, best = 0;
    for (int a = 0; a < g.dim(); ++a) {
      if (nc[a] < 7) continue;
      if (g.boundary() == Boundary::Periodic && g.extent(a) % (2 * s[a]) != 0) continue;
      if (nc[a] > best) {
        best = nc[a];
        pick = a;
      }
    }
    if (pick >= 0) {
      s[pick] *= 2;
      nc[pick] = g.boundary() == Boundary::Periodic
                     ? g.extent(pick) / s[pick]
                     : (g.extent(pick) - 1) / s[pick] + 1;
      progress = true;
    }
  }
  // A radial grid resamples away from the centre: keeping node 0 would put
  // the first coarse node at r far below the coarse spacing, and the 1/r
  // terms would swamp the stencil there.
  std::array<int, 3> off = {0, 0, 0};
  if (g.radial() && s[0] > 1) {
    off[0] = s[0] - 1;
    nc[0] = g.extent(0) / s[0];
  }
  std::vector<int> extents;
  std::vector<double> spacing, origin;
  for (int a = 0; a < g.dim(); ++a) {
    extents.push_back(nc[a]);
    spacing.push_back(g.spacing(a) * s[a]);
    origin.push_back(g.origin(a) + g.spacing(a) * off[a]);
  }
  return {Grid(extents, spacing, origin, g.boundary(), g.geometry()), s, off};
}

// Multilinear prolongation of a coarse solver-space vector onto the fine grid.
VecD prolongate(const Grid& fine, const CoarsePlan& plan, const VecD& coarse) {
  const Grid& cg = plan.grid;
  VecD out(static_cast<Eigen::Index>(fine.size()));
  for (std::size_t node = 0; node < fine.size(); ++node) {
    const auto ijk = fine.unpack(node);
    double acc = 0.0;
    int cell[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < fine.dim(); ++a) {
      const double t =
          static_cast<double>(ijk[a] - plan.offset[a]) / plan.stride[a];
      int i = static_cast<int>(std::floor(t));
      double f = t - i;
      if (i < 0) {
        i = 0;
        f = 0.0;
      }
      if (fine.boundary() != Boundary::Periodic && i >= cg.extent(a) - 1) {
        i = cg.extent(a) - 2;
        f = 1.0;
      }
      cell[a] = i;
      frac[a] = f;
    }
    const int corners = 1 << fine.dim();
    for (int m = 0; m < corners; ++m) {
      double w = 1.0;
      int idx[3] = {0, 0, 0};
      for (int a = 0; a < fine.dim(); ++a) {
        const bool upper = m & (1 << a);
        int i = cell[a] + (upper ? 1 : 0);
        if (fine.boundary() == Boundary::Periodic && i == cg.extent(a)) i = 0;
        idx[a] = i;
        w *= upper ? frac[a] : 1.0 - frac[a];
      }
      if (w != 0.0)
        acc += w * coarse[static_cast<Eigen::Index>(cg.index(idx[0], idx[1], idx[2]))];
    }
    out[static_cast<Eigen::Index>(node)] = acc;
  }
  return out;
}

ScalarField sample_field(const ScalarField& f, const CoarsePlan& plan) {
  ScalarField out(plan.grid);
  const Grid& cg = plan.grid;
  for (std::size_t node = 0; node < cg.size(); ++node) {
    const auto ijk = cg.unpack(node);
    out[node] = f.at(ijk[0] * plan.stride[0] + plan.offset[0],
                     ijk[1] * plan.stride[1] + plan.offset[1],
                     ijk[2] * plan.stride[2] + plan.offset[2]);
  }
  return out;
}

}  // namespace

void HamiltonianSpec::validate() const {
  const Grid& g = potential.grid();
  require(mass > 0.0 && hbar > 0.0, "HamiltonianSpec: mass, hbar must be > 0");
  require(g.boundary() != Boundary::Reflecting,
          "HamiltonianSpec: reflecting boundaries not supported");
  if (g.radial())
    require(g.boundary() == Boundary::DirichletZero,
            "HamiltonianSpec: radial grids must be Dirichlet");
  if (vectorPotential) {
    require_same_grid(vectorPotential->grid(), g, "HamiltonianSpec (A)");
    require(!g.radial(), "HamiltonianSpec: vector potential needs a cartesian grid");
    require(lightSpeed > 0.0, "HamiltonianSpec: lightSpeed must be > 0 with A");
  }
  if (scalarPotential)
    require_same_grid(scalarPotential->grid(), g, "HamiltonianSpec (phi)");
  for (double v : potential.values())
    require(std::isfinite(v), "HamiltonianSpec: potential has non-finite nodes");
}

WaveFunction apply_h(const HamiltonianSpec& spec, const WaveFunction& psi) {
  spec.validate();
  require_same_grid(spec.potential.grid(), psi.grid(), "apply_h");
  VecC c;
  to_solver(psi, c);
  SpMatC H = assemble<Cplx>(spec, 0.0);
  VecC y = H * c;
  return from_solver(psi.grid(), y, psi.mass(), psi.hbar());
}

std::complex<double> inner(const WaveFunction& a, const WaveFunction& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  std::vector<double> re(a.size()), im(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Cplx p = std::conj(a[i]) * b[i] * a.grid().weight(i);
    re[i] = p.real();
    im[i] = p.imag();
  }
  return {pairwise_sum(re), pairwise_sum(im)};
}

double energy_expectation(const HamiltonianSpec& spec, const WaveFunction& psi) {
  return inner(psi, apply_h(spec, psi)).real();
}

EigenSolution solve_stationary(const HamiltonianSpec& spec, int k, double tol) {
  spec.validate();
  require(!spec.vectorPotential, "solve_stationary: vector potential not supported");
  const Grid& g = spec.potential.grid();
  require(k >= 1 && static_cast<std::size_t>(k) + 2 < g.size(),
          "solve_stationary: k out of range");
  require(g.dim() <= 2 || g.radial(), "solve_stationary: 1-D, 2-D, or radial grids");

  SpMatD H = assemble<double>(spec, 0.0);
  const double scale = operator_scale(H);

  // Coarse dense solve for shift estimates and start vectors.
  CoarsePlan plan = coarsen(g, 1200);
  HamiltonianSpec coarseSpec = spec;
  coarseSpec.potential = sample_field(spec.potential, plan);
  if (spec.scalarPotential)
    coarseSpec.scalarPotential = sample_field(*spec.scalarPotential, plan);
  SpMatD Hc = assemble<double>(coarseSpec, 0.0);
  const Eigen::MatrixXd HcDense(Hc);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(HcDense);
  require(dense.info() == Eigen::Success, "solve_stationary: coarse eigensolve failed");
  require(static_cast<Eigen::Index>(k) <= dense.eigenvalues().size(),
          "solve_stationary: k exceeds coarse problem size");

  const double span =
      dense.eigenvalues()[dense.eigenvalues().size() - 1] - dense.eigenvalues()[0];

  EigenSolution sol;
  std::vector<VecD> found;
  for (int i = 0; i < k; ++i) {
    const double coarseE = dense.eigenvalues()[i];
    VecD x = prolongate(g, plan, VecD(dense.eigenvectors().col(i)));
    if (x.norm() == 0.0) x.setOnes();
    x.normalize();
    double sigma = coarseE - 1.0e-4 * (std::abs(coarseE) + 1.0e-3 * span + 1.0e-30);
    double lambda = coarseE;
    double res = std::numeric_limits<double>::infinity();
    Eigen::SparseLU<SpMatD> lu;
    bool refactor = true;
    for (int iter = 0; iter < 60; ++iter) {
      if (refactor) {
        SpMatD A = H;
        for (Eigen::Index d = 0; d < A.rows(); ++d) A.coeffRef(d, d) -= sigma;
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
          // Shift landed on an eigenvalue; nudge and retry.
          sigma -= 1.0e-8 * (std::abs(sigma) + span + 1.0e-30);
          SpMatD B = H;
          for (Eigen::Index d = 0; d < B.rows(); ++d) B.coeffRef(d, d) -= sigma;
          lu.compute(B);
          require(lu.info() == Eigen::Success, "solve_stationary: factorization failed");
        }
        refactor = false;
      }
      for (const VecD& f : found) x -= f.dot(x) * f;
      VecD y = lu.solve(x);
      const double yn = y.norm();
      require(std::isfinite(yn) && yn > 0.0, "solve_stationary: inverse iteration broke down");
      y /= yn;
      for (const VecD& f : found) y -= f.dot(y) * f;
      y.normalize();
      VecD Hy = H * y;
      lambda = y.dot(Hy);
      res = (Hy - lambda * y).norm() / std::max(Hy.norm(), 1.0e-3 * scale);
      x = y;
      if (res <= tol) break;
      // Rayleigh-quotient shift update, slightly offset to stay factorable.
      const double next = lambda - 1.0e-9 * (std::abs(lambda) + span + 1.0e-30);
      if (next != sigma) {
        sigma = next;
        refactor = true;
      }
    }
    require(res <= 1.0e-8, "solve_stationary: eigenpair residual above 1e-8");
    // Deterministic sign: largest-magnitude coefficient positive.
    Eigen::Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (x[imax] < 0.0) x = -x;
    found.push_back(x);
    sol.energies.push_back(lambda);
    sol.residualNorms.push_back(res);
    VecC xc = x.cast<Cplx>();
    WaveFunction psi = from_solver(g, xc, spec.mass, spec.hbar);
    psi.normalize();
    sol.states.push_back(std::move(psi));
  }
  return sol;
}

namespace {

struct CnStepper {
  const HamiltonianSpec* spec;
  SpMatC H;
  SpMatC Aminus;
  Eigen::SparseLU<SpMatC> lu;
  double alpha = 0.0;

  void build(double shift) {
    SpMatC M = assemble<Cplx>(*spec, shift);
    H = M;
    SpMatC I(M.rows(), M.cols());
    I.setIdentity();
    SpMatC Aplus = I + Cplx(0.0, alpha) * M;
    Aminus = I - Cplx(0.0, alpha) * M;
    lu.compute(Aplus);
    require(lu.info() == Eigen::Success, "evolve: factorization failed");
  }
};

}  // namespace

EvolveResult evolve(const HamiltonianSpec& spec, const WaveFunction& psi0,
                    double dt, int nSteps, const EvolveOptions& opts) {
  spec.validate();
  require_same_grid(spec.potential.grid(), psi0.grid(), "evolve");
  require(dt > 0.0 && std::isfinite(dt), "evolve: dt must be > 0");
  require(nSteps >= 0, "evolve: nSteps must be >= 0");
  const Grid& g = psi0.grid();
  const double wUnit = weight_unit(g);

  VecC c;
  to_solver(psi0, c);
  CnStepper step;
  step.spec = &spec;
  step.alpha = dt / (2.0 * spec.hbar);
  step.build(opts.couplingShift ? opts.couplingShift(psi0) : 0.0);

  EvolveResult out;
  out.psi = psi0;
  auto record = [&](double t) {
    out.times.push_back(t);
    out.norms.push_back(std::sqrt(wUnit) * c.norm());
    const VecC Hc = step.H * c;
    out.energies.push_back(wUnit * c.dot(Hc).real());
  };
  record(0.0);
  if (opts.snapshotStride > 0) {
    out.snapshots.push_back(psi0);
    out.snapshotTimes.push_back(0.0);
  }
  for (int s = 0; s < nSteps; ++s) {
    if (opts.couplingShift && s > 0)
      step.build(opts.couplingShift(from_solver(g, c, psi0.mass(), psi0.hbar())));
    VecC rhs = step.Aminus * c;
    c = step.lu.solve(rhs);
    require(c.allFinite(), "evolve: state became non-finite");
    record((s + 1) * dt);
    if (opts.snapshotStride > 0 && (s + 1) % opts.snapshotStride == 0) {
      out.snapshots.push_back(from_solver(g, c, psi0.mass(), psi0.hbar()));
      out.snapshotTimes.push_back((s + 1) * dt);
    }
  }
  out.psi = from_solver(g, c, psi0.mass(), psi0.hbar());
  return out;
}

EvolveResult evolve_magnetic(const HamiltonianSpec& spec, const WaveFunction& psi0,
                             double dt, int nSteps, const EvolveOptions& opts) {
  return evolve(spec, psi0, dt, nSteps, opts);
}

MadelungFields madelung_fields(const WaveFunction& psi, const VectorField& v) {
  psi.check_normalized(1.0e-6);
  require_same_grid(psi.grid(), v.grid(), "madelung_fields");
  MadelungFields m;
  m.rho = fields::density_from_wavefunction(psi);
  auto pa = fields::phase_and_amplitude(psi);
  m.logAmplitude = std::move(pa.logAmplitude);
  m.phase = std::move(pa.phase);
  m.osmotic = fields::osmotic_velocity(m.rho, psi.beta());
  VectorField gradS = fields::phase_gradient(psi);
  m.current = VectorField(psi.grid());
  const double s = psi.hbar() / psi.mass();
  for (std::size_t i = 0; i < m.current.values().size(); ++i)
    m.current.values()[i] = s * gradS.values()[i] - v.values()[i];
  auto drifts = fields::drift_fields(m.current, m.osmotic);
  m.driftForward = std::move(drifts.forward);
  m.driftBackward = std::move(drifts.backward);
  return m;
}

}  // namespace zitter::schrod
