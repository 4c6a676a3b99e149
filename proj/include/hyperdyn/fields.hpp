#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "hyperdyn/geometry.hpp"

namespace hyperdyn {

/// Uniform node grid on [x_min, x_max] x [y_min, y_max], y_min > 0.
///
/// Nodes are stored row-major with x outer and y inner: node (i, j) lives at
/// index i * ny + j. Golden files rely on this order.
class Grid {
 public:
  /// Throws ConfigError unless x_min < x_max, 0 < y_min < y_max, nx, ny >= 4.
  Grid(double x_min, double x_max, double y_min, double y_max, std::size_t nx, std::size_t ny);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  std::size_t size() const { return nx_ * ny_; }

  double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * hx_; }
  double y(std::size_t j) const { return y_min_ + static_cast<double>(j) * hy_; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * ny_ + j; }
  HalfPlanePoint point(std::size_t i, std::size_t j) const { return {x(i), y(j), 0.0}; }

  bool contains(double x, double y) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double x_min_, x_max_, y_min_, y_max_;
  std::size_t nx_, ny_;
  double hx_, hy_;
};

/// Node values on a grid. Values are finite; construction checks.
class ScalarField {
 public:
  ScalarField(Grid grid, std::vector<double> values);
  static ScalarField zeros(const Grid& grid);
  static ScalarField sample(const Grid& grid, const std::function<double(const HalfPlanePoint&)>& f);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }

  /// Bilinear interpolation; DomainError outside the grid rectangle.
  double interpolate(double x, double y) const;

  double max_abs() const;
  ScalarField scaled(double c) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Contravariant components (A^x, A^y) of the vector potential.
class VectorPotentialField {
 public:
  VectorPotentialField(ScalarField ax, ScalarField ay);
  static VectorPotentialField zeros(const Grid& grid);
  static VectorPotentialField sample(
      const Grid& grid, const std::function<std::pair<double, double>(const HalfPlanePoint&)>& f);

  const Grid& grid() const { return ax_.grid(); }
  const ScalarField& ax() const { return ax_; }
  const ScalarField& ay() const { return ay_; }
  const ScalarField& component(int i) const { return i == 0 ? ax_ : ay_; }

  VectorPotentialField scaled(double c) const;

 private:
  ScalarField ax_;
  ScalarField ay_;
};

/// B = B_z dx^dy.
class MagneticTwoForm {
 public:
  explicit MagneticTwoForm(ScalarField bz) : bz_(std::move(bz)) {}

  /// The uniform reference form y^-2 dx^dy.
  static MagneticTwoForm uniform_reference(const Grid& grid);

  const Grid& grid() const { return bz_.grid(); }
  const ScalarField& bz() const { return bz_; }

 private:
  ScalarField bz_;
};

/// An (x, y) pair of per-component results.
struct ComponentPair {
  ScalarField x;
  ScalarField y;
};

/// Covariant components (A_x, A_y) = (g11 A^x, g22 A^y) at p.
std::pair<double, double> lower_index(const VectorPotentialField& a, const HalfPlanePoint& p);

/// B_z = d_x A_y - d_y A_x on the lowered components.
MagneticTwoForm exterior_derivative(const VectorPotentialField& a);

/// d_x(sqrt_g A^x) + d_y(sqrt_g A^y), without the 1/sqrt_g prefactor.
ScalarField covariant_divergence(const VectorPotentialField& a);

/// Rough (Bochner) Laplacian A^{i;k}_{;k} of component i (0 = x, 1 = y),
/// assembled term by term from the Christoffel symbols:
///
///   [g^jk (A^i_,k + G^i_lk A^l)]_,j
///     + g^jl G^i_kj (A^k_,l + G^k_lm A^m)
///     + g^kl G^j_kj (A^i_,l + G^i_lm A^m)
///
/// Partials are central differences (second-order one-sided at edges); the
/// outer derivative differences the assembled flux, so the effective
/// second-derivative stencil is 2h wide.
ScalarField covariant_laplacian(const VectorPotentialField& a, int component);

/// Residual lap(A) + lambda^2 A per component. Zero iff A is a Laplacian
/// eigenmode with eigenvalue -lambda^2.
ComponentPair eigenmode_check(const VectorPotentialField& a, double lambda);

/// Trapezoidal integral of f against the area form sqrt_g dx dy = y^-2 dx dy.
double integrate_volume(const ScalarField& f);

/// Finite-difference partials used by every operator above: central in the
/// interior, second-order one-sided on the edges.
ScalarField partial_x(const ScalarField& f);
ScalarField partial_y(const ScalarField& f);

/// CSV with header `x,y,value`, node order as stored, 17 significant digits.
void write_csv(std::ostream& out, const ScalarField& f);
ScalarField read_csv(std::istream& in, const Grid& grid);

}  // namespace hyperdyn
