#pragma once
#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zitter/constants.hpp"
#include "zitter/vec3.hpp"

namespace zitter {

enum class Boundary { DirichletZero, Reflecting, Periodic };
enum class Geometry { Cartesian, RadialSpherical };

std::string to_string(Boundary b);
std::string to_string(Geometry g);
Boundary boundary_from_string(const std::string& s);
Geometry geometry_from_string(const std::string& s);

// Uniform structured grid, 1 to 3 axes, row-major (last axis fastest).
// RadialSpherical is a 1-D grid of radii r > 0 whose integration weight is
// the shell volume 4*pi*r^2*h; differential operators pick up the radial
// forms of div/laplacian.
class Grid {
 public:
  Grid(std::vector<int> extents, std::vector<double> spacing,
       std::vector<double> origin, Boundary boundary,
       Geometry geometry = Geometry::Cartesian);

  int dim() const { return dim_; }
  std::size_t size() const { return size_; }
  int extent(int axis) const { return n_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double origin(int axis) const { return o_[axis]; }
  Boundary boundary() const { return boundary_; }
  Geometry geometry() const { return geometry_; }
  bool radial() const { return geometry_ == Geometry::RadialSpherical; }

  std::size_t index(int i, int j = 0, int k = 0) const {
    return (static_cast<std::size_t>(i) * n_[1] + j) * n_[2] + k;
  }
  std::array<int, 3> unpack(std::size_t idx) const {
    const int k = static_cast<int>(idx % n_[2]);
    const int j = static_cast<int>((idx / n_[2]) % n_[1]);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(n_[1]) * n_[2]));
    return {i, j, k};
  }
  double coord(int axis, int i) const { return o_[axis] + h_[axis] * i; }
  Vec3 coords(std::size_t idx) const {
    const auto ijk = unpack(idx);
    Vec3 p;
    for (int a = 0; a < dim_; ++a) p[a] = coord(a, ijk[a]);
    return p;
  }
  // Integration weight of one node (cell volume; shell volume when radial).
  double weight(std::size_t idx) const {
    if (geometry_ == Geometry::RadialSpherical) {
      const double r = coord(0, static_cast<int>(idx));
      return 4.0 * kPi * r * r * h_[0];
    }
    return cellVolume_;
  }
  double cell_volume() const { return cellVolume_; }
  double min_spacing() const;
  double max_spacing() const;

  bool operator==(const Grid& o) const;
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int dim_;
  std::array<int, 3> n_;
  std::array<double, 3> h_;
  std::array<double, 3> o_;
  Boundary boundary_;
  Geometry geometry_;
  std::size_t size_;
  double cellVolume_;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(Grid grid, double fill = 0.0);
  ScalarField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double& at(int i, int j = 0, int k = 0) { return v_[grid_.index(i, j, k)]; }
  double at(int i, int j = 0, int k = 0) const { return v_[grid_.index(i, j, k)]; }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  double max_abs() const;
  double max() const;

 private:
  Grid grid_{{3}, {1.0}, {0.0}, Boundary::DirichletZero};
  std::vector<double> v_;
};

// Node-major storage: dim components per node, grid.dim() of them in use.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(Grid grid);
  VectorField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  int comps() const { return grid_.dim(); }
  double& comp(std::size_t node, int c) { return v_[node * comps() + c]; }
  double comp(std::size_t node, int c) const { return v_[node * comps() + c]; }
  Vec3 vec(std::size_t node) const {
    Vec3 p;
    for (int c = 0; c < comps(); ++c) p[c] = comp(node, c);
    return p;
  }
  void set_vec(std::size_t node, const Vec3& p) {
    for (int c = 0; c < comps(); ++c) comp(node, c) = p[c];
  }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }
  double max_node_norm() const;

 private:
  Grid grid_{{3}, {1.0}, {0.0}, Boundary::DirichletZero};
  std::vector<double> v_;
};

class WaveFunction {
 public:
  WaveFunction() = default;
  WaveFunction(Grid grid, double mass, double hbar);
  WaveFunction(Grid grid, std::vector<std::complex<double>> psi, double mass,
               double hbar);

  const Grid& grid() const { return grid_; }
  double mass() const { return mass_; }
  double hbar() const { return hbar_; }
  double beta() const { return hbar_ / (2.0 * mass_); }
  std::complex<double>& operator[](std::size_t i) { return psi_[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return psi_[i]; }
  std::vector<std::complex<double>>& values() { return psi_; }
  const std::vector<std::complex<double>>& values() const { return psi_; }
  std::size_t size() const { return psi_.size(); }

  double norm() const;                   // sqrt(integral |psi|^2)
  void normalize();
  void check_normalized(double tol = 1.0e-7) const;

 private:
  Grid grid_{{3}, {1.0}, {0.0}, Boundary::DirichletZero};
  std::vector<std::complex<double>> psi_;
  double mass_ = 1.0;
  double hbar_ = 1.0;
};

// Two snapshots of a field bracketing a time interval.
template <typename FieldT>
struct TimePair {
  FieldT earlier;
  FieldT later;
  double dt = 0.0;
};

// Fixed-order pairwise summation; deterministic independent of threading
// because callers always pass data in storage order.
double pairwise_sum(std::span<const double> v);
double integrate(const ScalarField& f);

void require(bool cond, const std::string& msg);
void require_same_grid(const Grid& a, const Grid& b, const std::string& where);

}  // namespace zitter
