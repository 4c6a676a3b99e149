#include "hyperdyn/analytic.hpp"

#include <cmath>
#include <sstream>

#include "hyperdyn/errors.hpp"

namespace hyperdyn {
namespace {

double checked_exp(double arg) {
  if (!(std::abs(arg) <= kMaxExponent)) {
    std::ostringstream msg;
    msg << "exponent " << arg << " exceeds the representable range";
    throw RangeError(msg.str());
  }
  return std::exp(arg);
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw DegenerateError(std::string(name) + " must be finite");
}

}  // namespace

void ForceFreeParams::validate() const {
  require_finite(a0, "a0");
  require_finite(k_sep, "k_sep");
  require_finite(lambda, "lambda");
  require_finite(eta, "eta");
  require_finite(v0, "v0");
  if (eta < 0.0) throw DegenerateError("eta must be non-negative");
}

void ForcedParams::validate() const {
  require_finite(gamma, "gamma");
  require_finite(v0, "v0");
  require_finite(eta, "eta");
  if (eta < 0.0) throw DegenerateError("eta must be non-negative");
}

double growth_rate(const ForceFreeParams& p) {
  return p.v0 * p.k_sep - p.lambda * p.lambda * p.eta;
}

std::pair<double, double> force_free_potential(const HalfPlanePoint& p, double t,
                                               const ForceFreeParams& params) {
  const double inv_y2 = 1.0 / (p.y() * p.y());
  const double ax = params.a0 * checked_exp(growth_rate(params) * t + params.k_sep * inv_y2);
  const double ay =
      params.a0 * p.y() * p.y() * checked_exp(-params.eta * params.lambda * params.lambda * t);
  return {ax, ay};
}

double force_free_bz(const HalfPlanePoint& p, double t, const ForceFreeParams& params) {
  const double inv_y = 1.0 / p.y();
  const double inv_y2 = inv_y * inv_y;
  const double bracket = -2.0 * inv_y2 * inv_y + inv_y2 * inv_y2;
  return 2.0 * params.a0 * bracket * checked_exp(params.k_sep * inv_y2 + growth_rate(params) * t);
}

double reversal_line_force_free() { return 0.5; }

double forced_potential(const HalfPlanePoint& p, double t, const ForcedParams& params) {
  const double y = p.y();
  const double arg = p.x() * (params.gamma / y - params.v0 / (y * y)) + params.gamma * t;
  return y * y * checked_exp(arg);
}

double forced_bz(const HalfPlanePoint& p, double t, const ForcedParams& params) {
  const double y = p.y();
  const double ax = forced_potential(p, t, params);
  return 2.0 / (y * y) * p.x() * ax * (params.gamma - 0.5 * params.v0 / y);
}

ReversalLine reversal_line_forced(const ForcedParams& params) {
  if (params.gamma == 0.0) {
    throw DegenerateError("forced reversal line undefined for gamma = 0");
  }
  const double y0 = params.v0 / (2.0 * params.gamma);
  return {y0, y0 > 0.0};
}

double restoring_force(double y) { return -y; }

double nongeodesic_residual(double y, VerticalProfile profile, double force_claimed,
                            ArcLengthMode mode) {
  const HalfPlanePoint p(0.0, y);
  double vy = 0.0;
  double dvy_dy = 0.0;
  if (profile == VerticalProfile::y_squared) {
    vy = y * y;
    dvy_dy = 2.0 * y;
  }
  const double dy_ds = mode == ArcLengthMode::chain_rule ? vy : y;
  const double lhs = dvy_dy * dy_ds + christoffel_at(p).gamma_y_yy() * vy * vy;
  return lhs - force_claimed;
}

double deviation_solution(double s, double j0) { return j0 * std::sinh(s); }

}  // namespace hyperdyn
