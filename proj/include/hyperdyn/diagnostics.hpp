#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperdyn/analytic.hpp"
#include "hyperdyn/fields.hpp"
#include "hyperdyn/solver.hpp"

namespace hyperdyn {

struct GrowthFit {
  double gamma_est;
  double intercept;
  std::pair<double, double> fit_window;
  double residual_rms;
  std::size_t points;
};

/// Least-squares slope of ln(norm) against t over the final window_fraction
/// of the time span. Throws DegenerateError with fewer than 3 points in the
/// window or a non-positive norm there.
GrowthFit fit_growth_rate(std::span<const double> times, std::span<const double> norms,
                          double window_fraction = 0.5);

/// E(B) = integral of B_z^2 y^-2 dx dy (trapezoidal).
double magnetic_energy(const MagneticTwoForm& b);

/// Integral of |B_z| y^-2 dx dy, the norm whose log-slope bounds the growth rate.
double field_l1_norm(const MagneticTwoForm& b);

struct Crossing {
  double y;
  int sign_change;  // +1: B_z goes from negative to positive with increasing y
};

/// Sign changes of B_z along the vertical line x = x_slice, each located by
/// bisection on a local cubic interpolant to within hy / 100.
std::vector<Crossing> reversal_scan(const MagneticTwoForm& b, double x_slice);

struct EntropyCheck {
  double gamma_est;
  double gamma_formula;
  double htop_lower_bound;  // max(gamma_formula, 0)
  double v0_threshold;      // eta lambda^2 / k_sep
  bool rate_matches;        // |gamma_est - gamma_formula| <= tolerance
  bool fast_dynamo;         // gamma_formula >= 0
  bool v0_above_threshold;  // v0 >= v0_threshold
  bool consistent() const { return fast_dynamo == v0_above_threshold; }
};

/// Checks the ordering h_top >= gamma(eta) >= 0 <=> v0 >= eta lambda^2 / k_sep.
/// The rate tolerance is relative to max(|gamma_formula|, 1). Throws
/// DegenerateError if k_sep <= 0.
EntropyCheck entropy_bound_check(const ForceFreeParams& params, double gamma_est,
                                 double rel_tolerance = 0.01);

struct DeviationSample {
  double s;
  double j;
};

/// RK4 for J'' = J (geodesic deviation on curvature -1) with J(0) = j0,
/// J'(0) = dj0. Returns n_steps + 1 samples. Throws DegenerateError unless
/// n_steps >= 10 and s_end > 0.
std::vector<DeviationSample> integrate_deviation(double j0, double dj0, double s_end,
                                                 std::size_t n_steps);

struct EnergyGrowthReport {
  bool fit_skipped;  // zero or non-positive energy series
  double energy_rate = 0.0;
  double expected_rate = 0.0;  // 2 gamma
  double rate_rel_error = 0.0;
  // Literal small-y expression -(1/3) x y^-3 e^{gamma t} (stray z taken as 1)
  // against the quadrature on [x_min, x_max] x [y_min, 2 y_min].
  double literal_value = 0.0;
  double subdomain_energy = 0.0;
  double literal_ratio = 0.0;
  bool literal_sign_agrees = false;
  double evaluated_at_time = 0.0;
  std::string note;
};

EnergyGrowthReport energy_growth_report(const RunResult& result, const ForceFreeParams& params,
                                        double window_fraction = 0.5);

/// Norm series of the closed-form force-free field sampled on grid at times.
/// A stand-in RunResult for checks that need no time stepping.
RunResult closed_form_series(const Grid& grid, const ForceFreeParams& params,
                             std::span<const double> times);

}  // namespace hyperdyn
