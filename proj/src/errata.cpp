#include "hyperdyn/errata.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hyperdyn/diagnostics.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/solver.hpp"

namespace hyperdyn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double first_crossing(const MagneticTwoForm& b, double x) {
  const auto c = reversal_scan(b, x);
  return c.empty() ? kNaN : c.front().y;
}

double crossing_count(const MagneticTwoForm& b, double x) {
  return static_cast<double>(reversal_scan(b, x).size());
}

// max |f - ref| / max |ref|
double rel_gap(const ScalarField& f, const ScalarField& ref) {
  double num = 0.0;
  for (std::size_t n = 0; n < f.values().size(); ++n) {
    num = std::max(num, std::abs(f.values()[n] - ref.values()[n]));
  }
  return num / ref.max_abs();
}

ErrataEntry diffusion_sign(unsigned threads) {
  // Windowed mode that vanishes on the boundary, so dirichlet_zero is exact.
  const Grid g(0.0, 1.0, 1.0, 2.0, 24, 24);
  const auto init = VectorPotentialField::sample(g, [](const HalfPlanePoint& p) {
    using std::numbers::pi;
    return std::pair{0.0, p.y() * p.y() * std::sin(pi * p.x()) * std::sin(pi * (p.y() - 1.0))};
  });
  SolverConfig cfg{.grid = g, .eta = 0.1, .boundary = BoundaryPolicy::dirichlet_zero,
                   .threads = threads};
  cfg.dt = 0.5 * stability_bound(cfg);
  // Short horizon: under the reversed sign the grid-scale modes grow by up to
  // 2x per step and would swamp the smooth mode given long enough.
  cfg.t_end = 40.0 * cfg.dt;

  auto measure = [&](DiffusionSign sign, double& ratio, double& monotone) {
    cfg.diffusion_sign = sign;
    const RunResult r = run(cfg, init);
    const auto& n = r.field_l1_norms;
    ratio = n.back() / n.front();
    bool dec = true, inc = true;
    for (std::size_t k = 1; k < n.size(); ++k) {
      dec = dec && n[k] <= n[k - 1];
      inc = inc && n[k] >= n[k - 1];
    }
    monotone = sign == DiffusionSign::standard ? static_cast<double>(dec) : static_cast<double>(inc);
  };
  double std_ratio = 0, std_mono = 0, aw_ratio = 0, aw_mono = 0;
  measure(DiffusionSign::standard, std_ratio, std_mono);
  measure(DiffusionSign::as_written, aw_ratio, aw_mono);

  return {
      .id = "diffusion_sign",
      .location = "vector-form induction equation vs its component equations",
      .finding = "the vector form puts +eta lap(A) beside dA/dt, i.e. -eta lap(A) on the right "
                 "hand side; that is anti-diffusive. The component equations and the decay "
                 "factor exp(-eta lambda^2 t) of A^y need the standard sign.",
      .first = {"standard", "dA/dt = adv + eta lap(A); value = final/initial L1 norm", std_ratio},
      .second = {"as_written", "dA/dt = adv - eta lap(A); value = final/initial L1 norm",
                 aw_ratio},
      .measurements = {{"standard_monotone_decay", std_mono},
                       {"as_written_monotone_growth", aw_mono},
                       {"eta", cfg.eta},
                       {"t_end", cfg.t_end}},
  };
}

ErrataEntry bz_prefactor(const ErrataSettings& s) {
  const Grid& g = s.grid;
  const ForceFreeParams& p = s.force_free;
  const ScalarField printed =
      ScalarField::sample(g, [&](const HalfPlanePoint& q) { return force_free_bz(q, 0.0, p); });
  // Same bracket with y^-1, y^-2 in place of y^-3, y^-4, times a unit uniform field.
  const ScalarField combination = ScalarField::sample(g, [&](const HalfPlanePoint& q) {
    const double iy = 1.0 / q.y();
    return 2.0 * p.a0 * (-2.0 * iy + iy * iy) * std::exp(p.k_sep * iy * iy);
  });
  double ratio_dev = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      if (printed(i, j) == 0.0) continue;
      const double y = g.y(j);
      ratio_dev = std::max(ratio_dev, std::abs(combination(i, j) / printed(i, j) / (y * y) - 1.0));
    }
  }
  const auto a = VectorPotentialField::sample(
      g, [&](const HalfPlanePoint& q) { return force_free_potential(q, 0.0, p); });
  const MagneticTwoForm da = exterior_derivative(a);
  const double x_mid = 0.5 * (g.x_min() + g.x_max());

  // Exact -d_y A_x at y = 1 against the printed bracket there.
  const double e = std::exp(p.k_sep);
  return {
      .id = "bz_prefactor",
      .location = "force-free B_z: stated field vs its 'combination of uniform strengths' form",
      .finding = "the two printed brackets differ by a factor y^2 (equal only with B0 = y^-2); "
                 "neither equals dA of the stated potential, -d_y A_x = 2 a0 (K + y^2) y^-5 "
                 "exp(K y^-2 + gamma t), which has no zero for K >= 0.",
      .first = {"y^-3 bracket", "2 a0 (-2y^-3 + y^-4) exp(K y^-2); value = max|dA - B|/max|B|",
                rel_gap(da.bz(), printed)},
      .second = {"y^-1 bracket", "2 a0 (-2y^-1 + y^-2) exp(K y^-2); value = max|dA - B|/max|B|",
                 rel_gap(da.bz(), combination)},
      .measurements = {{"ratio_over_y2_max_dev", ratio_dev},
                       {"printed_crossings", crossing_count(MagneticTwoForm(printed), x_mid)},
                       {"dA_crossings", crossing_count(da, x_mid)},
                       {"printed_at_y1", 2.0 * p.a0 * (-1.0) * e},
                       {"minus_dy_lowered_at_y1", 2.0 * p.a0 * (p.k_sep + 1.0) * e},
                       {"minus_dy_contravariant_at_y1", 2.0 * p.a0 * p.k_sep * e}},
  };
}

ErrataEntry restoring_force_residual() {
  auto res = [](double y, ArcLengthMode m) {
    return nongeodesic_residual(y, VerticalProfile::y_squared, restoring_force(y), m);
  };
  return {
      .id = "restoring_force",
      .location = "non-geodesic equation with V^y = y^2 and the claimed force F = -y",
      .finding = "dV/ds + Gamma^y_yy V^2 does not reduce to -y under either reading of d/ds; "
                 "the residual is y^3 + y (flow parameter) or 2y^2 - y^3 + y (arc length).",
      .first = {"chain_rule", "dV/ds = V dV/dy; value = residual at y = 1",
                res(1.0, ArcLengthMode::chain_rule)},
      .second = {"metric_length", "dV/ds = y dV/dy; value = residual at y = 1",
                 res(1.0, ArcLengthMode::metric_length)},
      .measurements = {{"chain_rule_y0.5", res(0.5, ArcLengthMode::chain_rule)},
                       {"chain_rule_y2", res(2.0, ArcLengthMode::chain_rule)},
                       {"metric_length_y0.5", res(0.5, ArcLengthMode::metric_length)},
                       {"metric_length_y2", res(2.0, ArcLengthMode::metric_length)}},
  };
}

ErrataEntry energy_small_y(const ErrataSettings& s) {
  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) times.push_back(0.05 * k);
  const RunResult series = closed_form_series(s.grid, s.force_free, times);
  const EnergyGrowthReport rep = energy_growth_report(series, s.force_free);
  return {
      .id = "energy_small_y",
      .location = "small-y approximation of the magnetic energy",
      .finding = "the printed form -(1/3) x y^-3 z exp(gamma t) is negative, carries an "
                 "undefined z (taken as 1) and one power of exp(gamma t), while the energy is "
                 "positive and grows as exp(2 gamma t).",
      .first = {"literal", "-(1/3) (x_max - x_min) y_min^-3 exp(gamma t) at the final time",
                rep.literal_value},
      .second = {"quadrature", "integral of B_z^2 y^-2 over [x_min, x_max] x [y_min, 2 y_min]",
                 rep.subdomain_energy},
      .measurements = {{"literal_ratio", rep.literal_ratio},
                       {"literal_sign_agrees", rep.literal_sign_agrees ? 1.0 : 0.0},
                       {"energy_rate", rep.energy_rate},
                       {"two_gamma", rep.expected_rate},
                       {"literal_time_rate", growth_rate(s.force_free)},
                       {"time", rep.evaluated_at_time}},
  };
}

ErrataEntry flow_index(const ErrataSettings& s) {
  const ForceFreeParams p = s.force_free;
  const Grid g(s.grid.x_min(), s.grid.x_max(), s.grid.y_min(), s.grid.y_max(), 32, 64);
  const auto init = VectorPotentialField::sample(
      g, [&](const HalfPlanePoint& q) { return force_free_potential(q, 0.0, p); });
  auto rate = [&](FlowIndex index) {
    SolverConfig cfg{.grid = g,
                     .t_end = 0.2,
                     .eta = p.eta,
                     .flow = FlowField::vertical_profile(p.v0),
                     .boundary_family = [p](const HalfPlanePoint& q,
                                            double t) { return force_free_potential(q, t, p); },
                     .time_scheme = TimeScheme::ssp_rk3,
                     .flow_index = index,
                     .threads = s.threads};
    cfg.dt = 0.9 * stability_bound(cfg);
    try {
      const RunResult r = run(cfg, init);
      return fit_growth_rate(r.times, r.field_l1_norms).gamma_est;
    } catch (const InstabilityError&) {
      return kNaN;
    } catch (const DegenerateError&) {
      return kNaN;
    }
  };
  return {
      .id = "flow_index",
      .location = "advection term U_j (A^{i,j} - A^{j,i}): index position of U",
      .finding = "the covariance of U_j is not stated; lowering with the metric and using the "
                 "contravariant components directly give different growth rates.",
      .first = {"lowered", "U_j = g_jk U^k; value = fitted L1 growth rate", rate(FlowIndex::lowered)},
      .second = {"raw", "U_j = U^j; value = fitted L1 growth rate", rate(FlowIndex::raw)},
      .measurements = {{"gamma_formula", growth_rate(p)},
                       {"nx", static_cast<double>(g.nx())},
                       {"ny", static_cast<double>(g.ny())}},
  };
}

ErrataEntry forced_bz(const ErrataSettings& s) {
  const ForcedParams p = s.forced;
  // Tall enough to contain both candidate lines for the default parameters.
  const Grid g(0.5, 2.0, 0.25, 8.0, 16, 512);
  const double x = 1.0;
  const MagneticTwoForm printed(
      ScalarField::sample(g, [&](const HalfPlanePoint& q) { return forced_bz(q, 0.0, p); }));
  const auto a = VectorPotentialField::sample(
      g, [&](const HalfPlanePoint& q) { return std::pair{forced_potential(q, 0.0, p), 0.0}; });
  const MagneticTwoForm da = exterior_derivative(a);
  double lowered_factor_dev = 0.0;
  for (std::size_t j = 0; j < g.ny(); ++j) {
    const HalfPlanePoint q(x, g.y(j), 0.0);
    const double with_upper = forced_bz(q, 0.0, p);
    const double a_up = forced_potential(q, 0.0, p);
    const double with_lower = 2.0 / (q.y() * q.y()) * q.x() * (a_up / (q.y() * q.y())) *
                              (p.gamma - 0.5 * p.v0 / q.y());
    if (with_lower != 0.0) {
      lowered_factor_dev =
          std::max(lowered_factor_dev, std::abs(with_upper / with_lower / (q.y() * q.y()) - 1.0));
    }
  }
  const double printed_line = p.gamma != 0.0 ? p.v0 / (2.0 * p.gamma) : kNaN;
  const double da_line = p.gamma != 0.0 ? 2.0 * p.v0 / p.gamma : kNaN;
  return {
      .id = "forced_bz",
      .location = "forced B_z and its reversal line gamma y0 = V0 / 2",
      .finding = "reading A_x as the lowered component rescales B_z by y^-2 without moving the "
                 "line; but dA of the stated potential, -d_y A_x = x y^-2 A_x (gamma - 2 V0 / y), "
                 "vanishes at y0 = 2 V0 / gamma, not V0 / (2 gamma).",
      .first = {"printed", "2 y^-2 x A (gamma - V0 / (2y)); value = crossing at x = 1",
                first_crossing(printed, x)},
      .second = {"dA", "-d_y A_x of the stated potential; value = crossing at x = 1",
                 first_crossing(da, x)},
      .measurements = {{"printed_line", printed_line},
                       {"dA_line", da_line},
                       {"index_factor_y2_max_dev", lowered_factor_dev}},
  };
}

}  // namespace

std::vector<std::string> errata_ids() {
  return {"diffusion_sign", "bz_prefactor", "restoring_force", "energy_small_y", "flow_index",
          "forced_bz"};
}

std::vector<ErrataEntry> run_errata(const ErrataSettings& settings) {
  return {diffusion_sign(settings.threads), bz_prefactor(settings), restoring_force_residual(),
          energy_small_y(settings),         flow_index(settings),   forced_bz(settings)};
}

}  // namespace hyperdyn
