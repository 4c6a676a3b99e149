#include "hyperdyn/geometry.hpp"

#include <cmath>
#include <sstream>

#include "hyperdyn/errors.hpp"

namespace hyperdyn {

HalfPlanePoint::HalfPlanePoint(double x, double y, double min_y) : x_(x), y_(y) {
  if (!std::isfinite(x) || !std::isfinite(y) || !(y > min_y)) {
    std::ostringstream msg;
    msg << "point (" << x << ", " << y << ") is off the half-plane chart (y must exceed " << min_y
        << ")";
    throw DomainError(msg.str());
  }
}

MetricSample metric_at(const HalfPlanePoint& p) {
  const double y2 = p.y() * p.y();
  const double g = 1.0 / y2;
  // g * g_inv is 1 to within one ulp; no double pairing makes it exact for all y.
  const double g_inv = y2;
  return MetricSample{g, g, g, g_inv, g_inv};
}

ChristoffelSet christoffel_at(const HalfPlanePoint& p) {
  const double inv_y = 1.0 / p.y();
  std::array<double, 8> c{};
  auto set = [&c](int a, int b, int d, double v) {
    c[static_cast<std::size_t>(4 * a + 2 * b + d)] = v;
    c[static_cast<std::size_t>(4 * a + 2 * d + b)] = v;
  };
  set(0, 0, 1, -inv_y);  // Gamma^x_xy
  set(1, 1, 1, -inv_y);  // Gamma^y_yy
  set(1, 0, 0, inv_y);   // Gamma^y_xx
  return ChristoffelSet(c);
}

double riemann_1212_at(const HalfPlanePoint& p) {
  const MetricSample m = metric_at(p);
  return -(m.g11 * m.g22);
}

double gaussian_curvature_at(const HalfPlanePoint& p) {
  const MetricSample m = metric_at(p);
  const double det = m.g11 * m.g22;
  return riemann_1212_at(p) / det;
}

double gaussian_curvature_fd(const HalfPlanePoint& p, double h, double min_y) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError("finite-difference step must be positive");
  }
  // Constructing the outermost stencil points validates the chart.
  const HalfPlanePoint lowest(p.x(), p.y() - 2.0 * h, min_y);
  (void)lowest;

  auto log_conformal = [&](double x, double y) {
    return 0.5 * std::log(metric_at(HalfPlanePoint(x, y, min_y)).g11);
  };

  auto second_difference = [&](auto&& f) {
    return (-f(2.0) + 16.0 * f(1.0) - 30.0 * f(0.0) + 16.0 * f(-1.0) - f(-2.0)) / (12.0 * h * h);
  };

  const double dxx =
      second_difference([&](double k) { return log_conformal(p.x() + k * h, p.y()); });
  const double dyy =
      second_difference([&](double k) { return log_conformal(p.x(), p.y() + k * h); });

  const double conformal_sq = metric_at(p).g11;
  return -(dxx + dyy) / conformal_sq;
}

}  // namespace hyperdyn
