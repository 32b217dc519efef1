#include "zitter/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <thread>

#include "zitter/io.hpp"
#include "zitter/rng.hpp"

namespace zitter::langevin {

void StepperConfig::validate() const {
  require(dt > 0.0 && std::isfinite(dt), "StepperConfig: dt must be > 0");
  require(nSteps >= 0, "StepperConfig: nSteps must be >= 0");
  require(nPaths >= 1, "StepperConfig: nPaths must be >= 1");
  require(dim >= 1 && dim <= 3, "StepperConfig: dim must be 1..3");
  require(beta >= 0.0 && std::isfinite(beta), "StepperConfig: beta must be >= 0");
  require(recordStride >= 1, "StepperConfig: recordStride must be >= 1");
  require(nSteps % recordStride == 0, "StepperConfig: recordStride must divide nSteps");
  require(threads >= 1, "StepperConfig: threads must be >= 1");
}

namespace {

void run_paths(const StepperConfig& cfg, const DriftFn& drift, int pathBegin,
               int pathEnd, PathEnsemble& out) {
  const double sigma = std::sqrt(2.0 * cfg.beta * cfg.dt);
  for (int p = pathBegin; p < pathEnd; ++p) {
    rng::NormalStream stream(cfg.seed, static_cast<std::uint64_t>(p));
    Vec3 x = cfg.initial;
    std::size_t base = static_cast<std::size_t>(p) * out.nSnapshots * cfg.dim;
    for (int c = 0; c < cfg.dim; ++c) out.positions[base + c] = x[c];
    int snap = 1;
    for (int s = 0; s < cfg.nSteps; ++s) {
      const double t = s * cfg.dt;
      Vec3 b{};
      if (drift) {
        b = drift(x, t);
        if (!finite(b)) {
          std::ostringstream msg;
          msg << "simulate_ensemble: non-finite drift at path " << p << " step " << s;
          throw std::runtime_error(msg.str());
        }
      }
      Vec3 noise{};
      const auto st = static_cast<std::uint32_t>(s);
      const auto pr = stream.pair(st, 0);
      noise.x = pr[0];
      if (cfg.dim > 1) noise.y = pr[1];
      if (cfg.dim > 2) noise.z = stream.pair(st, 1)[0];
      x = x + cfg.dt * b + sigma * noise;
      if (!finite(x)) {
        std::ostringstream msg;
        msg << "simulate_ensemble: non-finite position at path " << p << " step " << s;
        throw std::runtime_error(msg.str());
      }
      if ((s + 1) % cfg.recordStride == 0) {
        const std::size_t at = base + static_cast<std::size_t>(snap) * cfg.dim;
        for (int c = 0; c < cfg.dim; ++c) out.positions[at + c] = x[c];
        ++snap;
      }
    }
  }
}

}  // namespace

PathEnsemble simulate_ensemble(const StepperConfig& cfg, const DriftFn& drift) {
  cfg.validate();
  PathEnsemble e;
  e.dim = cfg.dim;
  e.nPaths = cfg.nPaths;
  e.nSnapshots = cfg.nSteps / cfg.recordStride + 1;
  e.times.resize(e.nSnapshots);
  for (int s = 0; s < e.nSnapshots; ++s)
    e.times[s] = static_cast<double>(s) * cfg.recordStride * cfg.dt;
  e.positions.assign(static_cast<std::size_t>(cfg.nPaths) * e.nSnapshots * cfg.dim, 0.0);

  const int nThreads = std::min(cfg.threads, cfg.nPaths);
  if (nThreads <= 1) {
    run_paths(cfg, drift, 0, cfg.nPaths, e);
    return e;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nThreads);
  const int chunk = (cfg.nPaths + nThreads - 1) / nThreads;
  for (int t = 0; t < nThreads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(cfg.nPaths, lo + chunk);
    pool.emplace_back([&, t, lo, hi] {
      try {
        run_paths(cfg, drift, lo, hi, e);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errs)
    if (err) std::rethrow_exception(err);
  return e;
}

DriftFn grid_drift(const VectorField& field) {
  auto f = std::make_shared<const VectorField>(field);
  const Grid& g = f->grid();
  require(!g.radial(), "grid_drift: cartesian grids only");
  return [f](const Vec3& pos, double) -> Vec3 {
    const Grid& gr = f->grid();
    const int dim = gr.dim();
    int cell[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      const int n = gr.extent(a);
      const double h = gr.spacing(a);
      double s = (pos[a] - gr.origin(a)) / h;
      if (gr.boundary() == Boundary::Periodic) {
        s -= n * std::floor(s / n);
        const int i = std::min(static_cast<int>(s), n - 1);
        cell[a] = i;
        frac[a] = s - i;
      } else {
        s = std::clamp(s, 0.0, static_cast<double>(n - 1));
        const int i = std::min(static_cast<int>(s), n - 2);
        cell[a] = i;
        frac[a] = s - i;
      }
    }
    Vec3 out{};
    const int corners = 1 << dim;
    for (int m = 0; m < corners; ++m) {
      double w = 1.0;
      int idx[3] = {0, 0, 0};
      for (int a = 0; a < dim; ++a) {
        const bool upper = m & (1 << a);
        int i = cell[a] + (upper ? 1 : 0);
        if (gr.boundary() == Boundary::Periodic && i == gr.extent(a)) i = 0;
        idx[a] = i;
        w *= upper ? frac[a] : 1.0 - frac[a];
      }
      if (w == 0.0) continue;
      const Vec3 v = f->vec(gr.index(idx[0], idx[1], idx[2]));
      out += w * v;
    }
    return out;
  };
}

MsdResult msd_and_diffusion(const PathEnsemble& e, double transientCut) {
  require(e.nPaths >= 1 && e.nSnapshots >= 2, "msd_and_diffusion: need >= 2 snapshots");
  MsdResult r;
  r.t = e.times;
  r.msd.resize(e.nSnapshots);
  std::vector<double> contrib(e.nPaths);
  for (int s = 0; s < e.nSnapshots; ++s) {
    for (int p = 0; p < e.nPaths; ++p)
      contrib[p] = norm2(e.vec(p, s) - e.vec(p, 0));
    r.msd[s] = pairwise_sum(contrib) / e.nPaths;
  }
  // Least squares on the post-transient part of the curve.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (int s = 0; s < e.nSnapshots; ++s) {
    if (r.t[s] <= transientCut) continue;
    const double x = r.t[s], y = r.msd[s];
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    ++n;
  }
  require(n >= 2, "msd_and_diffusion: fewer than 2 points past the transient cut");
  const double det = n * sxx - sx * sx;
  require(det > 0.0, "msd_and_diffusion: degenerate time axis");
  r.slope = (n * sxy - sx * sy) / det;
  r.intercept = (sy - r.slope * sx) / n;
  const double ssTot = syy - sy * sy / n;
  double ssRes = 0.0;
  for (int s = 0; s < e.nSnapshots; ++s) {
    if (r.t[s] <= transientCut) continue;
    const double d = r.msd[s] - (r.intercept + r.slope * r.t[s]);
    ssRes += d * d;
  }
  r.rsq = ssTot > 0.0 ? 1.0 - ssRes / ssTot : 1.0;
  r.nFit = n;
  r.betaHat = r.slope / (2.0 * e.dim);
  return r;
}

std::string ensemble_csv(const PathEnsemble& e) {
  std::ostringstream os;
  os << "path,t";
  for (int c = 0; c < e.dim; ++c) os << ",x" << c;
  os << '\n';
  for (int p = 0; p < e.nPaths; ++p)
    for (int s = 0; s < e.nSnapshots; ++s) {
      os << p << ',' << io::fmt(e.times[s]);
      for (int c = 0; c < e.dim; ++c) os << ',' << io::fmt(e.pos(p, s, c));
      os << '\n';
    }
  return os.str();
}

double friction_coefficient(double mass, double nu) {
  require(mass > 0.0 && nu > 0.0, "friction_coefficient: mass, nu must be > 0");
  return 4.0 * kPi * mass * nu;
}

double alpha_relaxation(double t, double hnu, double xi, double mass, double C) {
  require(xi > 0.0 && mass > 0.0, "alpha_relaxation: xi, mass must be > 0");
  return 2.0 * hnu / xi + C * std::exp(-xi * t / mass);
}

namespace {

VectorField advect(const VectorField& b, const VectorField& f) {
  // (b . grad) f, componentwise.
  const Grid& g = f.grid();
  VectorField out(g);
  for (int c = 0; c < g.dim(); ++c) {
    ScalarField fc(g);
    for (std::size_t n = 0; n < g.size(); ++n) fc[n] = f.comp(n, c);
    VectorField gc = fields::gradient(fc);
    for (std::size_t n = 0; n < g.size(); ++n)
      out.comp(n, c) = dot(b.vec(n), gc.vec(n));
  }
  return out;
}

ScalarField midpoint(const ScalarField& a, const ScalarField& b) {
  ScalarField m = a;
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
  return m;
}

VectorField midpoint(const VectorField& a, const VectorField& b) {
  VectorField m = a;
  for (std::size_t i = 0; i < m.values().size(); ++i)
    m.values()[i] = 0.5 * (a.values()[i] + b.values()[i]);
  return m;
}

}  // namespace

ScalarField mean_forward_derivative(const ScalarField& f, const VectorField& b,
                                    double beta) {
  require_same_grid(f.grid(), b.grid(), "mean_forward_derivative");
  VectorField gf = fields::gradient(f);
  ScalarField lf = fields::laplacian(f);
  ScalarField out(f.grid());
  for (std::size_t n = 0; n < f.size(); ++n)
    out[n] = dot(b.vec(n), gf.vec(n)) + beta * lf[n];
  return out;
}

ScalarField mean_backward_derivative(const ScalarField& f, const VectorField& bStar,
                                     double beta) {
  return mean_forward_derivative(f, bStar, -beta);
}

VectorField mean_forward_derivative(const VectorField& f, const VectorField& b,
                                    double beta) {
  require_same_grid(f.grid(), b.grid(), "mean_forward_derivative");
  VectorField out = advect(b, f);
  VectorField lf = fields::laplacian(f);
  for (std::size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] += beta * lf.values()[i];
  return out;
}

VectorField mean_backward_derivative(const VectorField& f, const VectorField& bStar,
                                     double beta) {
  return mean_forward_derivative(f, bStar, -beta);
}

ScalarField mean_forward_derivative(const TimePair<ScalarField>& f,
                                    const VectorField& b, double beta) {
  require(f.dt > 0.0, "mean_forward_derivative: pair dt must be > 0");
  ScalarField out = mean_forward_derivative(midpoint(f.earlier, f.later), b, beta);
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] += (f.later[n] - f.earlier[n]) / f.dt;
  return out;
}

ScalarField mean_backward_derivative(const TimePair<ScalarField>& f,
                                     const VectorField& bStar, double beta) {
  require(f.dt > 0.0, "mean_backward_derivative: pair dt must be > 0");
  ScalarField out = mean_backward_derivative(midpoint(f.earlier, f.later), bStar, beta);
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] += (f.later[n] - f.earlier[n]) / f.dt;
  return out;
}

VectorField mean_forward_derivative(const TimePair<VectorField>& f,
                                    const VectorField& b, double beta) {
  require(f.dt > 0.0, "mean_forward_derivative: pair dt must be > 0");
  VectorField out = mean_forward_derivative(midpoint(f.earlier, f.later), b, beta);
  for (std::size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] += (f.later.values()[i] - f.earlier.values()[i]) / f.dt;
  return out;
}

VectorField mean_backward_derivative(const TimePair<VectorField>& f,
                                     const VectorField& bStar, double beta) {
  require(f.dt > 0.0, "mean_backward_derivative: pair dt must be > 0");
  VectorField out = mean_backward_derivative(midpoint(f.earlier, f.later), bStar, beta);
  for (std::size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] += (f.later.values()[i] - f.earlier.values()[i]) / f.dt;
  return out;
}

VectorField mean_acceleration(const VectorField& b, const VectorField& bStar,
                              double beta) {
  require_same_grid(b.grid(), bStar.grid(), "mean_acceleration");
  VectorField advFwd = advect(b, bStar);   // (b.grad) b*
  VectorField advBwd = advect(bStar, b);   // (b*.grad) b
  VectorField diff = b;
  for (std::size_t i = 0; i < diff.values().size(); ++i)
    diff.values()[i] = bStar.values()[i] - b.values()[i];
  VectorField lap = fields::laplacian(diff);
  VectorField out(b.grid());
  for (std::size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] =
        0.5 * (advFwd.values()[i] + advBwd.values()[i] + beta * lap.values()[i]);
  return out;
}

VectorField mean_acceleration(const TimePair<VectorField>& b,
                              const TimePair<VectorField>& bStar, double beta) {
  require(b.dt > 0.0 && b.dt == bStar.dt, "mean_acceleration: pair dts must match");
  VectorField out =
      mean_acceleration(midpoint(b.earlier, b.later), midpoint(bStar.earlier, bStar.later), beta);
  for (std::size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] += 0.5 * (b.later.values()[i] - b.earlier.values()[i] +
                              bStar.later.values()[i] - bStar.earlier.values()[i]) / b.dt;
  return out;
}

}  // namespace zitter::langevin
