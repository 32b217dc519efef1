#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zitter/fields.hpp"
#include "zitter/grid.hpp"

namespace zitter::langevin {

struct StepperConfig {
  double dt = 1.0e-3;
  int nSteps = 0;
  int nPaths = 1;
  std::uint64_t seed = 0;
  double beta = 1.0;     // diffusion coefficient, <dW^2> = 2*beta*dt per axis
  int dim = 1;
  int recordStride = 1;  // keep every k-th step (t = 0 always kept)
  Vec3 initial{};
  int threads = 1;

  void validate() const;
};

struct PathEnsemble {
  int dim = 1;
  int nPaths = 0;
  int nSnapshots = 0;
  std::vector<double> times;      // nSnapshots
  std::vector<double> positions;  // [path][snapshot][component]

  double pos(int path, int snap, int c) const {
    return positions[(static_cast<std::size_t>(path) * nSnapshots + snap) * dim + c];
  }
  Vec3 vec(int path, int snap) const {
    Vec3 p;
    for (int c = 0; c < dim; ++c) p[c] = pos(path, snap, c);
    return p;
  }
};

using DriftFn = std::function<Vec3(const Vec3&, double)>;

inline Vec3 euler_maruyama_step(const Vec3& pos, const Vec3& drift, double beta,
                                double dt, const Vec3& noise) {
  return pos + dt * drift + std::sqrt(2.0 * beta * dt) * noise;
}

// Drift may be empty (free diffusion). Non-finite drift or position aborts
// with the offending path and step in the message. Identical (config, seed)
// give bitwise-identical ensembles for any thread count.
PathEnsemble simulate_ensemble(const StepperConfig& cfg, const DriftFn& drift);

// Multilinear interpolation of a grid drift field; positions outside the box
// are clamped (periodic grids wrap).
DriftFn grid_drift(const VectorField& field);

struct MsdResult {
  std::vector<double> t;
  std::vector<double> msd;
  double slope = 0.0;
  double intercept = 0.0;
  double betaHat = 0.0;  // slope / (2 dim)
  double rsq = 0.0;
  int nFit = 0;
};
MsdResult msd_and_diffusion(const PathEnsemble& e, double transientCut = 0.0);

std::string ensemble_csv(const PathEnsemble& e);

double friction_coefficient(double mass, double nu);  // 4 pi m nu
// alpha(t) = 2 h nu / xi + C exp(-xi t / m); hnu is the energy h*nu.
double alpha_relaxation(double t, double hnu, double xi, double mass, double C);

// Mean forward/backward derivatives D = d/dt + b.grad + beta lap and
// D* = d/dt + b*.grad - beta lap. Static overloads drop the time term;
// pair overloads difference the two slices and evaluate spatial terms at the
// midpoint average.
ScalarField mean_forward_derivative(const ScalarField& f, const VectorField& b, double beta);
ScalarField mean_backward_derivative(const ScalarField& f, const VectorField& bStar, double beta);
VectorField mean_forward_derivative(const VectorField& f, const VectorField& b, double beta);
VectorField mean_backward_derivative(const VectorField& f, const VectorField& bStar, double beta);
ScalarField mean_forward_derivative(const TimePair<ScalarField>& f, const VectorField& b, double beta);
ScalarField mean_backward_derivative(const TimePair<ScalarField>& f, const VectorField& bStar, double beta);
VectorField mean_forward_derivative(const TimePair<VectorField>& f, const VectorField& b, double beta);
VectorField mean_backward_derivative(const TimePair<VectorField>& f, const VectorField& bStar, double beta);

// a = (DD* + D*D)/2 applied to the position process. Expanding the operator
// products with Dx = b and D*x = b* gives
//   a = [d(b+b*)/dt + (b.grad)b* + (b*.grad)b + beta lap(b* - b)] / 2.
VectorField mean_acceleration(const VectorField& b, const VectorField& bStar, double beta);
VectorField mean_acceleration(const TimePair<VectorField>& b,
                              const TimePair<VectorField>& bStar, double beta);

}  // namespace zitter::langevin
