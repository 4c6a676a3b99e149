#pragma once

#include <utility>

#include "hyperdyn/geometry.hpp"

namespace hyperdyn {

/// Parameters of the force-free family. k_sep is the separation constant in
/// the exponent of A^x, not the Gaussian curvature.
struct ForceFreeParams {
  double a0 = 1.0;
  double k_sep = 1.0;
  double lambda = 1.0;
  double eta = 0.0;
  double v0 = 0.0;

  /// Throws DegenerateError if eta < 0 or anything is non-finite.
  void validate() const;

  bool operator==(const ForceFreeParams&) const = default;
};

struct ForcedParams {
  double gamma = -1.0;
  double v0 = 0.0;
  double eta = 0.0;

  void validate() const;

  bool operator==(const ForcedParams&) const = default;
};

/// gamma(eta) = v0 k_sep - lambda^2 eta.
double growth_rate(const ForceFreeParams& p);

/// A^x = a0 exp(gamma t + k_sep y^-2), A^y = a0 y^2 exp(-eta lambda^2 t).
/// Throws RangeError when an exponent exceeds kMaxExponent in magnitude.
std::pair<double, double> force_free_potential(const HalfPlanePoint& p, double t,
                                               const ForceFreeParams& params);

/// B_z = 2 a0 (-2 y^-3 + y^-4) (sinh + cosh)(k_sep y^-2) e^{gamma t}, with
/// sinh + cosh folded into one exponential.
double force_free_bz(const HalfPlanePoint& p, double t, const ForceFreeParams& params);

/// The reversal line of the force-free family, y0 = 1/2.
double reversal_line_force_free();

/// A^x = y^2 exp(x (gamma / y - v0 / y^2) + gamma t). A^y vanishes identically.
double forced_potential(const HalfPlanePoint& p, double t, const ForcedParams& params);

/// B_z = 2 y^-2 x A (gamma - v0 / (2y)) with A the value of forced_potential.
double forced_bz(const HalfPlanePoint& p, double t, const ForcedParams& params);

struct ReversalLine {
  double y0;
  bool physical;  // y0 > 0
};

/// y0 = v0 / (2 gamma). Throws DegenerateError when gamma == 0.
ReversalLine reversal_line_forced(const ForcedParams& params);

enum class VerticalProfile { y_squared, zero };

/// How d/ds is read in the non-geodesic equation.
enum class ArcLengthMode {
  chain_rule,    // s is the flow parameter: dy/ds = V^y
  metric_length  // s is metric arc length along a vertical line: dy/ds = y
};

/// The restoring force F(y) = -y claimed for the V^y = y^2 flow.
double restoring_force(double y);

/// dV^y/ds + Gamma^y_yy (V^y)^2 - force_claimed at height y.
/// Chain-rule reading with V^y = y^2 gives y^3 + y against F = -y.
double nongeodesic_residual(double y, VerticalProfile profile, double force_claimed,
                            ArcLengthMode mode = ArcLengthMode::chain_rule);

/// J(s) = j0 sinh(s), the deviation of neighbouring geodesics for K = -1.
double deviation_solution(double s, double j0);

/// Largest exponent magnitude evaluated before RangeError.
inline constexpr double kMaxExponent = 700.0;

}  // namespace hyperdyn
