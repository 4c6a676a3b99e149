#pragma once

#include <array>

namespace hyperdyn {

/// Smallest y accepted by default. y^-4 stays finite well above this.
inline constexpr double kDefaultMinY = 1e-6;

/// A point (x, y) of the upper half-plane, y > min_y.
class HalfPlanePoint {
 public:
  /// Throws DomainError when y <= min_y (or either coordinate is not finite).
  HalfPlanePoint(double x, double y, double min_y = kDefaultMinY);

  double x() const { return x_; }
  double y() const { return y_; }

 private:
  double x_;
  double y_;
};

/// Metric ds^2 = y^-2 (dx^2 + dy^2) at a point. Index 1 is x, 2 is y.
struct MetricSample {
  double g11;
  double g22;
  double sqrt_g;
  double g_inv11;
  double g_inv22;
};

/// Christoffel symbols of the second kind, Gamma^a_bc, indices 0 = x, 1 = y.
class ChristoffelSet {
 public:
  ChristoffelSet() = default;
  explicit ChristoffelSet(const std::array<double, 8>& components) : c_(components) {}

  double operator()(int upper, int lower1, int lower2) const {
    return c_[static_cast<std::size_t>(4 * upper + 2 * lower1 + lower2)];
  }

  double gamma_x_xy() const { return (*this)(0, 0, 1); }
  double gamma_y_yy() const { return (*this)(1, 1, 1); }
  double gamma_y_xx() const { return (*this)(1, 0, 0); }

  const std::array<double, 8>& components() const { return c_; }

 private:
  std::array<double, 8> c_{};
};

MetricSample metric_at(const HalfPlanePoint& p);

ChristoffelSet christoffel_at(const HalfPlanePoint& p);

/// R_1212 = -y^-4.
double riemann_1212_at(const HalfPlanePoint& p);

/// K = R_1212 / det(g). Exactly -1 in floating point.
double gaussian_curvature_at(const HalfPlanePoint& p);

/// Curvature from finite differences of the conformal factor,
/// K = -lap_flat(ln l) / l^2 with l^2 = g11.
///
/// Uses the five-point fourth-order second difference, so the stencil reaches
/// y - 2h. Throws DomainError when that point is off the chart or h <= 0.
double gaussian_curvature_fd(const HalfPlanePoint& p, double h, double min_y = kDefaultMinY);

}  // namespace hyperdyn
