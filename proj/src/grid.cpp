#include "zitter/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zitter {

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::DirichletZero: return "dirichlet";
    case Boundary::Reflecting: return "reflecting";
    case Boundary::Periodic: return "periodic";
  }
  return "?";
}

std::string to_string(Geometry g) {
  return g == Geometry::Cartesian ? "cartesian" : "radial";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "dirichlet") return Boundary::DirichletZero;
  if (s == "reflecting") return Boundary::Reflecting;
  if (s == "periodic") return Boundary::Periodic;
  throw std::invalid_argument("unknown boundary '" + s + "'");
}

Geometry geometry_from_string(const std::string& s) {
  if (s == "cartesian") return Geometry::Cartesian;
  if (s == "radial") return Geometry::RadialSpherical;
  throw std::invalid_argument("unknown geometry '" + s + "'");
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void require_same_grid(const Grid& a, const Grid& b, const std::string& where) {
  if (a != b) throw std::invalid_argument(where + ": grids differ");
}

Grid::Grid(std::vector<int> extents, std::vector<double> spacing,
           std::vector<double> origin, Boundary boundary, Geometry geometry)
    : boundary_(boundary), geometry_(geometry) {
  dim_ = static_cast<int>(extents.size());
  require(dim_ >= 1 && dim_ <= 3, "Grid: dim must be 1..3");
  require(spacing.size() == extents.size() && origin.size() == extents.size(),
          "Grid: extents/spacing/origin sizes differ");
  n_ = {1, 1, 1};
  h_ = {1.0, 1.0, 1.0};
  o_ = {0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    require(extents[a] >= 3, "Grid: need at least 3 points per axis");
    require(spacing[a] > 0.0 && std::isfinite(spacing[a]), "Grid: spacing must be > 0");
    require(std::isfinite(origin[a]), "Grid: origin must be finite");
    n_[a] = extents[a];
    h_[a] = spacing[a];
    o_[a] = origin[a];
  }
  if (geometry_ == Geometry::RadialSpherical) {
    require(dim_ == 1, "Grid: radial geometry is 1-D");
    require(o_[0] > 0.0, "Grid: radial grid must start at r > 0");
  }
  size_ = static_cast<std::size_t>(n_[0]) * n_[1] * n_[2];
  cellVolume_ = 1.0;
  for (int a = 0; a < dim_; ++a) cellVolume_ *= h_[a];
}

double Grid::min_spacing() const {
  double m = h_[0];
  for (int a = 1; a < dim_; ++a) m = std::min(m, h_[a]);
  return m;
}

double Grid::max_spacing() const {
  double m = h_[0];
  for (int a = 1; a < dim_; ++a) m = std::max(m, h_[a]);
  return m;
}

bool Grid::operator==(const Grid& o) const {
  if (dim_ != o.dim_ || boundary_ != o.boundary_ || geometry_ != o.geometry_)
    return false;
  for (int a = 0; a < dim_; ++a)
    if (n_[a] != o.n_[a] || h_[a] != o.h_[a] || o_[a] != o.o_[a]) return false;
  return true;
}

ScalarField::ScalarField(Grid grid, double fill)
    : grid_(std::move(grid)), v_(grid_.size(), fill) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
  require(v_.size() == grid_.size(), "ScalarField: value count != grid size");
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

double ScalarField::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v_) m = std::max(m, x);
  return m;
}

VectorField::VectorField(Grid grid)
    : grid_(std::move(grid)), v_(grid_.size() * grid_.dim(), 0.0) {}

VectorField::VectorField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
  require(v_.size() == grid_.size() * static_cast<std::size_t>(grid_.dim()),
          "VectorField: value count != grid size * dim");
}

double VectorField::max_node_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) m = std::max(m, norm(vec(i)));
  return m;
}

WaveFunction::WaveFunction(Grid grid, double mass, double hbar)
    : grid_(std::move(grid)), psi_(grid_.size()), mass_(mass), hbar_(hbar) {
  require(mass_ > 0.0 && hbar_ > 0.0, "WaveFunction: mass and hbar must be > 0");
}

WaveFunction::WaveFunction(Grid grid, std::vector<std::complex<double>> psi,
                           double mass, double hbar)
    : grid_(std::move(grid)), psi_(std::move(psi)), mass_(mass), hbar_(hbar) {
  require(psi_.size() == grid_.size(), "WaveFunction: value count != grid size");
  require(mass_ > 0.0 && hbar_ > 0.0, "WaveFunction: mass and hbar must be > 0");
}

double WaveFunction::norm() const {
  std::vector<double> dens(psi_.size());
  for (std::size_t i = 0; i < psi_.size(); ++i)
    dens[i] = std::norm(psi_[i]) * grid_.weight(i);
  return std::sqrt(pairwise_sum(dens));
}

void WaveFunction::normalize() {
  const double n = norm();
  require(n > 0.0 && std::isfinite(n), "WaveFunction: cannot normalize zero/non-finite state");
  const double s = 1.0 / n;
  for (auto& p : psi_) p *= s;
}

void WaveFunction::check_normalized(double tol) const {
  const double n = norm();
  if (std::abs(n - 1.0) > tol)
    throw std::invalid_argument("WaveFunction: not normalized (|norm-1| = " +
                                std::to_string(std::abs(n - 1.0)) + ")");
}

double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 32) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double integrate(const ScalarField& f) {
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) w[i] = f[i] * f.grid().weight(i);
  return pairwise_sum(w);
}

}  // namespace zitter
