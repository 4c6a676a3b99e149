#include "hyperdyn/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "hyperdyn/errors.hpp"

namespace hyperdyn {

GrowthFit fit_growth_rate(std::span<const double> times, std::span<const double> norms,
                          double window_fraction) {
  if (times.size() != norms.size()) throw DegenerateError("times and norms differ in length");
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw DegenerateError("window fraction must lie in (0, 1]");
  }
  if (times.size() < 3) throw DegenerateError("growth fit needs at least 3 points");
  const double t0 = times.front();
  const double t1 = times.back();
  const double start = t1 - window_fraction * (t1 - t0) - 1e-12 * std::abs(t1 - t0);

  double st = 0, sl = 0;
  std::size_t n = 0;
  std::size_t first = times.size();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < start) continue;
    if (!(norms[k] > 0.0)) throw DegenerateError("non-positive norm inside the fit window");
    first = std::min(first, k);
    const double l = std::log(norms[k]);
    st += times[k];
    sl += l;
    ++n;
  }
  if (n < 3) throw DegenerateError("growth fit window holds fewer than 3 points");

  // Centred sums keep the normal equations well conditioned.
  const double tm = st / static_cast<double>(n);
  const double lm = sl / static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t k = first; k < times.size(); ++k) {
    const double dt = times[k] - tm;
    sxx += dt * dt;
    sxy += dt * (std::log(norms[k]) - lm);
  }
  if (!(sxx > 0.0)) throw DegenerateError("fit window has zero time extent");
  const double slope = sxy / sxx;
  const double intercept = lm - slope * tm;
  double ss = 0;
  for (std::size_t k = first; k < times.size(); ++k) {
    const double r = std::log(norms[k]) - (intercept + slope * times[k]);
    ss += r * r;
  }
  return GrowthFit{slope, intercept, {times[first], t1}, std::sqrt(ss / static_cast<double>(n)), n};
}

double magnetic_energy(const MagneticTwoForm& b) {
  const auto v = b.bz().values();
  std::vector<double> sq(v.size());
  std::transform(v.begin(), v.end(), sq.begin(), [](double x) { return x * x; });
  return integrate_volume(ScalarField(b.grid(), std::move(sq)));
}

double field_l1_norm(const MagneticTwoForm& b) {
  const auto v = b.bz().values();
  std::vector<double> mag(v.size());
  std::transform(v.begin(), v.end(), mag.begin(), [](double x) { return std::abs(x); });
  return integrate_volume(ScalarField(b.grid(), std::move(mag)));
}

std::vector<Crossing> reversal_scan(const MagneticTwoForm& b, double x_slice) {
  const Grid& g = b.grid();
  if (!(x_slice >= g.x_min() && x_slice <= g.x_max())) {
    throw DomainError("x_slice lies outside the grid");
  }
  std::vector<double> column(g.ny());
  for (std::size_t j = 0; j < g.ny(); ++j) column[j] = b.bz().interpolate(x_slice, g.y(j));

  // Cubic through the four nodes around bracket [j, j+1], shifted at edges.
  auto cubic = [&](std::size_t j, double y) {
    std::size_t k0 = j == 0 ? 0 : j - 1;
    if (k0 + 3 >= g.ny()) k0 = g.ny() - 4;
    double sum = 0.0;
    for (std::size_t a = k0; a < k0 + 4; ++a) {
      double w = 1.0;
      for (std::size_t c = k0; c < k0 + 4; ++c) {
        if (c != a) w *= (y - g.y(c)) / (g.y(a) - g.y(c));
      }
      sum += w * column[a];
    }
    return sum;
  };

  auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };

  std::vector<Crossing> out;
  std::size_t last = g.ny();  // last node with nonzero value
  for (std::size_t j = 0; j < g.ny(); ++j) {
    const int s = sign(column[j]);
    if (s == 0) continue;
    if (last != g.ny() && sign(column[last]) != s) {
      double y_cross = 0.0;
      if (j == last + 1) {
        double lo = g.y(last);
        double hi = g.y(j);
        const int s_lo = sign(column[last]);
        // Endpoint values of the cubic equal the nodes, so the bracket holds.
        for (int it = 0; it < 60 && hi - lo > 1e-8 * g.hy(); ++it) {
          const double mid = 0.5 * (lo + hi);
          const int sm = sign(cubic(last, mid));
          if (sm == 0) {
            lo = hi = mid;
            break;
          }
          (sm == s_lo ? lo : hi) = mid;
        }
        y_cross = 0.5 * (lo + hi);
      } else {
        // Run of exact zeros between the two signed nodes.
        y_cross = 0.5 * (g.y(last + 1) + g.y(j - 1));
      }
      out.push_back(Crossing{y_cross, s > 0 ? +1 : -1});
    }
    last = j;
  }
  return out;
}

EntropyCheck entropy_bound_check(const ForceFreeParams& params, double gamma_est,
                                 double rel_tolerance) {
  if (!(params.k_sep > 0.0)) throw DegenerateError("entropy bound needs k_sep > 0");
  params.validate();
  EntropyCheck c{};
  c.gamma_est = gamma_est;
  c.gamma_formula = growth_rate(params);
  c.htop_lower_bound = std::max(c.gamma_formula, 0.0);
  c.v0_threshold = params.eta * params.lambda * params.lambda / params.k_sep;
  c.rate_matches = std::abs(gamma_est - c.gamma_formula) <=
                   rel_tolerance * std::max(std::abs(c.gamma_formula), 1.0);
  c.fast_dynamo = c.gamma_formula >= 0.0;
  c.v0_above_threshold = params.v0 >= c.v0_threshold;
  return c;
}

std::vector<DeviationSample> integrate_deviation(double j0, double dj0, double s_end,
                                                 std::size_t n_steps) {
  if (n_steps < 10) throw DegenerateError("integrate_deviation needs n_steps >= 10");
  if (!(s_end > 0.0) || !std::isfinite(s_end)) {
    throw DegenerateError("integrate_deviation needs s_end > 0");
  }
  const double h = s_end / static_cast<double>(n_steps);
  std::vector<DeviationSample> out;
  out.reserve(n_steps + 1);
  double j = j0;
  double v = dj0;
  out.push_back({0.0, j});
  // J'' = -K J with K = -1
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double k1j = v, k1v = j;
    const double k2j = v + 0.5 * h * k1v, k2v = j + 0.5 * h * k1j;
    const double k3j = v + 0.5 * h * k2v, k3v = j + 0.5 * h * k2j;
    const double k4j = v + h * k3v, k4v = j + h * k3j;
    j += h / 6.0 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    out.push_back({static_cast<double>(k) * h, j});
  }
  return out;
}

RunResult closed_form_series(const Grid& grid, const ForceFreeParams& params,
                             std::span<const double> times) {
  RunResult r{.times = {}, .field_l1_norms = {}, .energy = {}, .divergence_max = {}, .snapshots = {}, .final_state = {}, .steps = 0, .config = SolverConfig{.grid = grid, .eta = params.eta}};
  for (double t : times) {
    const MagneticTwoForm b(ScalarField::sample(
        grid, [&](const HalfPlanePoint& p) { return force_free_bz(p, t, params); }));
    r.times.push_back(t);
    r.field_l1_norms.push_back(field_l1_norm(b));
    r.energy.push_back(magnetic_energy(b));
    r.divergence_max.push_back(0.0);
  }
  return r;
}

EnergyGrowthReport energy_growth_report(const RunResult& result, const ForceFreeParams& params,
                                        double window_fraction) {
  EnergyGrowthReport rep{};
  if (result.energy.empty()) throw DegenerateError("run result has no energy series");
  const bool positive =
      std::all_of(result.energy.begin(), result.energy.end(), [](double e) { return e > 0.0; });
  rep.expected_rate = 2.0 * growth_rate(params);
  if (!positive) {
    rep.fit_skipped = true;
    rep.note = "energy series is not strictly positive; rate fit skipped";
    return rep;
  }
  const GrowthFit fit = fit_growth_rate(result.times, result.energy, window_fraction);
  rep.fit_skipped = false;
  rep.energy_rate = fit.gamma_est;
  rep.rate_rel_error = std::abs(fit.gamma_est - rep.expected_rate) /
                       std::max(std::abs(rep.expected_rate), 1e-300);

  const Grid& g = result.config.grid;
  const double t = result.times.back();
  rep.evaluated_at_time = t;
  const double y_lo = g.y_min();
  const double y_hi = 2.0 * g.y_min();
  const std::size_t ny_sub = 65;
  const Grid sub(g.x_min(), g.x_max(), y_lo, y_hi, std::max<std::size_t>(g.nx(), 4), ny_sub);
  const MagneticTwoForm b(ScalarField::sample(
      sub, [&](const HalfPlanePoint& p) { return force_free_bz(p, t, params); }));
  rep.subdomain_energy = magnetic_energy(b);
  const double width = g.x_max() - g.x_min();
  rep.literal_value = -width / (3.0 * y_lo * y_lo * y_lo) * std::exp(growth_rate(params) * t);
  rep.literal_ratio = rep.literal_value / rep.subdomain_energy;
  rep.literal_sign_agrees = (rep.literal_value > 0.0) == (rep.subdomain_energy > 0.0);
  rep.note =
      "literal small-y form grows as exp(gamma t); the energy of a field growing as exp(gamma t) "
      "grows as exp(2 gamma t)";
  return rep;
}

}  // namespace hyperdyn
