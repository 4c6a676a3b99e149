#include "hyperdyn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "hyperdyn/errors.hpp"

namespace hyperdyn {

FlowField FlowField::vertical_profile(double v0) {
  FlowField f;
  f.kind_ = FlowKind::vertical_profile;
  f.v0_ = v0;
  return f;
}

FlowField FlowField::horizontal_constant(double v0) {
  FlowField f;
  f.kind_ = FlowKind::horizontal_constant;
  f.v0_ = v0;
  return f;
}

FlowField FlowField::custom(ComponentPair contravariant) {
  if (!(contravariant.x.grid() == contravariant.y.grid())) {
    throw std::invalid_argument("custom flow components must share a grid");
  }
  FlowField f;
  f.kind_ = FlowKind::custom_sampled;
  f.custom_ = std::move(contravariant);
  return f;
}

std::pair<double, double> FlowField::at(const Grid& grid, std::size_t i, std::size_t j) const {
  switch (kind_) {
    case FlowKind::vertical_profile: {
      const double y = grid.y(j);
      return {0.0, v0_ * y * y};
    }
    case FlowKind::horizontal_constant:
      return {v0_, 0.0};
    case FlowKind::custom_sampled:
      if (!(custom_->x.grid() == grid)) {
        throw std::invalid_argument("custom flow sampled on a different grid");
      }
      return {custom_->x(i, j), custom_->y(i, j)};
  }
  return {0.0, 0.0};
}

ComponentPair advection_term(const VectorPotentialField& a, const FlowField& flow,
                             FlowIndex index) {
  const Grid& g = a.grid();
  // d[k][l] = d_l A^k
  const ScalarField d[2][2] = {{partial_x(a.ax()), partial_y(a.ax())},
                               {partial_x(a.ay()), partial_y(a.ay())}};
  std::vector<double> out[2] = {std::vector<double>(g.size()), std::vector<double>(g.size())};
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    for (std::size_t jy = 0; jy < g.ny(); ++jy) {
      const std::size_t n = g.index(ix, jy);
      const MetricSample m = metric_at(g.point(ix, jy));
      const double g_lo[2] = {m.g11, m.g22};
      const double g_up[2] = {m.g_inv11, m.g_inv22};
      const auto [ux, uy] = flow.at(g, ix, jy);
      const double u_up[2] = {ux, uy};
      double u_lo[2];
      for (int j = 0; j < 2; ++j) u_lo[j] = index == FlowIndex::lowered ? g_lo[j] * u_up[j] : u_up[j];

      // raised[k][j] = A^{k,j} = g^{jj} d_j A^k (diagonal metric)
      double raised[2][2];
      for (int k = 0; k < 2; ++k) {
        for (int j = 0; j < 2; ++j) raised[k][j] = g_up[j] * d[k][j].values()[n];
      }
      for (int i = 0; i < 2; ++i) {
        double s = 0.0;
        for (int j = 0; j < 2; ++j) s += u_lo[j] * (raised[i][j] - raised[j][i]);
        out[i][n] = s;
      }
    }
  }
  return {ScalarField(g, std::move(out[0])), ScalarField(g, std::move(out[1]))};
}

namespace {

// Explicit update of the component induction equation on one grid.
//
// With the Christoffel symbols of the half-plane substituted, the rough
// Laplacian reduces to
//   lap^x = y^2 (A^x_xx + A^x_yy) - 2y A^x_y - 2y A^y_x + A^x
//   lap^y = y^2 (A^y_xx + A^y_yy) + 2y A^x_x - 2y A^y_y + A^y
// which is evaluated here with the compact 5-point stencil. The advection
// term keeps only j != i, since the j == i terms cancel identically:
//   adv^x = U_y (A^{x,y} - A^{y,x}),  adv^y = U_x (A^{y,x} - A^{x,y}).
class Stepper {
 public:
  explicit Stepper(const SolverConfig& cfg)
      : cfg_(cfg),
        g_(cfg.grid),
        nx_(g_.nx()),
        ny_(g_.ny()),
        periodic_(cfg.boundary == BoundaryPolicy::periodic_x_dirichlet_y) {
    if (cfg.boundary == BoundaryPolicy::dirichlet_analytic && !cfg.boundary_family) {
      throw ConfigError("dirichlet_analytic boundary needs an analytic family");
    }
    y2_.resize(ny_);
    two_y_.resize(ny_);
    for (std::size_t j = 0; j < ny_; ++j) {
      const double y = g_.y(j);
      y2_[j] = metric_at(g_.point(0, j)).g_inv22;
      two_y_[j] = 2.0 * y;
    }
    // U_y g^yy and U_x g^xx per node
    cy_.resize(g_.size());
    cx_.resize(g_.size());
    for (std::size_t i = 0; i < nx_; ++i) {
      for (std::size_t j = 0; j < ny_; ++j) {
        const std::size_t n = g_.index(i, j);
        const auto [ux, uy] = cfg.flow.at(g_, i, j);
        const MetricSample m = metric_at(g_.point(i, j));
        const double lx = cfg.flow_index == FlowIndex::lowered ? m.g11 * ux : ux;
        const double ly = cfg.flow_index == FlowIndex::lowered ? m.g22 * uy : uy;
        cx_[n] = lx * m.g_inv11;
        cy_[n] = ly * m.g_inv22;
      }
    }
    diffusion_ = cfg.diffusion_sign == DiffusionSign::standard ? cfg.eta : -cfg.eta;
    threads_ = std::max(1u, cfg.threads);
  }

  // out = in + dt * rhs(in) on the nodes the stencil owns. Returns false if
  // any updated value is not finite.
  bool euler(const double* ax, const double* ay, double dt, double* out_x, double* out_y) const {
    const std::size_t i_begin = periodic_ ? 0 : 1;
    const std::size_t i_end = periodic_ ? nx_ : nx_ - 1;
    std::vector<char> poison(nx_, 0);
    parallel_rows(i_begin, i_end, [&](std::size_t lo, std::size_t hi) {
      std::vector<double> rx(ny_), ry(ny_);
      for (std::size_t i = lo; i < hi; ++i) {
        rhs_row(i, ax, ay, rx.data(), ry.data());
        const std::size_t base = i * ny_;
        poison[i] = !axpy_row(ax + base, ay + base, rx.data(), ry.data(), dt, out_x + base,
                              out_y + base);
      }
    });
    for (char p : poison) {
      if (p) return false;
    }
    return true;
  }

  // Right-hand side on the interior nodes of row i.
  void rhs_row(std::size_t i, const double* __restrict ax, const double* __restrict ay,
               double* __restrict rx, double* __restrict ry) const {
    const std::size_t ip = i + 1 == nx_ ? 0 : i + 1;
    const std::size_t im = i == 0 ? nx_ - 1 : i - 1;
    const double ihx = 1.0 / g_.hx();
    const double ihy = 1.0 / g_.hy();
    const double ihx2 = ihx * ihx;
    const double ihy2 = ihy * ihy;
    const double* __restrict cx = ax + i * ny_;
    const double* __restrict ex = ax + ip * ny_;
    const double* __restrict wx = ax + im * ny_;
    const double* __restrict cyy = ay + i * ny_;
    const double* __restrict ey = ay + ip * ny_;
    const double* __restrict wy = ay + im * ny_;
    const double* __restrict ux = cx_.data() + i * ny_;
    const double* __restrict uy = cy_.data() + i * ny_;
    const double* __restrict y2 = y2_.data();
    const double* __restrict two_y = two_y_.data();
    const double diffusion = diffusion_;
    const std::size_t n = ny_;
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double ax_x = 0.5 * (ex[j] - wx[j]) * ihx;
      const double ax_y = 0.5 * (cx[j + 1] - cx[j - 1]) * ihy;
      const double ay_x = 0.5 * (ey[j] - wy[j]) * ihx;
      const double ay_y = 0.5 * (cyy[j + 1] - cyy[j - 1]) * ihy;
      const double ax_lap = (ex[j] - 2.0 * cx[j] + wx[j]) * ihx2 +
                            (cx[j + 1] - 2.0 * cx[j] + cx[j - 1]) * ihy2;
      const double ay_lap = (ey[j] - 2.0 * cyy[j] + wy[j]) * ihx2 +
                            (cyy[j + 1] - 2.0 * cyy[j] + cyy[j - 1]) * ihy2;
      const double lap_x = y2[j] * ax_lap - two_y[j] * ax_y - two_y[j] * ay_x + cx[j];
      const double lap_y = y2[j] * ay_lap + two_y[j] * ax_x - two_y[j] * ay_y + cyy[j];
      const double adv_x = uy[j] * (ax_y - ay_x);
      const double adv_y = ux[j] * (ay_x - ax_y);
      rx[j] = adv_x + diffusion * lap_x;
      ry[j] = adv_y + diffusion * lap_y;
    }
  }

  // out = in + dt * r on the interior of one row; false if any result is not finite.
  bool axpy_row(const double* __restrict cx, const double* __restrict cy,
                const double* __restrict rx, const double* __restrict ry, double dt,
                double* __restrict ox, double* __restrict oy) const {
    const std::size_t n = ny_;
    // v - v is 0 for finite v and NaN otherwise
    int bad = 0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double vx = cx[j] + dt * rx[j];
      const double vy = cy[j] + dt * ry[j];
      ox[j] = vx;
      oy[j] = vy;
      bad |= static_cast<int>((vx - vx) + (vy - vy) != 0.0);
    }
    return bad == 0;
  }

  void apply_boundary(double* ax, double* ay, const double* prev_x, const double* prev_y,
                      double t) const {
    auto pin = [&](std::size_t i, std::size_t j) {
      const std::size_t n = g_.index(i, j);
      switch (cfg_.boundary) {
        case BoundaryPolicy::dirichlet_zero:
          ax[n] = 0.0;
          ay[n] = 0.0;
          break;
        case BoundaryPolicy::dirichlet_analytic:
          std::tie(ax[n], ay[n]) = cfg_.boundary_family(g_.point(i, j), t);
          break;
        case BoundaryPolicy::periodic_x_dirichlet_y:
          if (cfg_.boundary_family) {
            std::tie(ax[n], ay[n]) = cfg_.boundary_family(g_.point(i, j), t);
          } else {
            ax[n] = prev_x[n];
            ay[n] = prev_y[n];
          }
          break;
      }
    };
    for (std::size_t i = 0; i < nx_; ++i) {
      pin(i, 0);
      pin(i, ny_ - 1);
    }
    if (!periodic_) {
      for (std::size_t j = 1; j + 1 < ny_; ++j) {
        pin(0, j);
        pin(nx_ - 1, j);
      }
    }
  }

  std::size_t size() const { return g_.size(); }

 private:
  template <typename F>
  void parallel_rows(std::size_t begin, std::size_t end, F&& f) const {
    const std::size_t rows = end - begin;
    const std::size_t workers = std::min<std::size_t>(threads_, rows);
    if (workers <= 1) {
      f(begin, end);
      return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = (rows + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
      const std::size_t lo = begin + w * chunk;
      const std::size_t hi = std::min(end, lo + chunk);
      if (lo < hi) pool.emplace_back([&f, lo, hi] { f(lo, hi); });
    }
    f(begin, std::min(end, begin + chunk));
  }

  const SolverConfig& cfg_;
  const Grid& g_;
  std::size_t nx_, ny_;
  bool periodic_;
  std::vector<double> y2_, two_y_, cx_, cy_;
  double diffusion_ = 0.0;
  unsigned threads_ = 1;
};

// Advance (ax, ay) from t to t + dt in place. Returns false on a non-finite
// value.
bool advance(const Stepper& s, const SolverConfig& cfg, std::vector<double>& ax,
             std::vector<double>& ay, std::vector<double> (&work)[4], double t, double dt) {
  auto& [x1, y1, x2, y2] = work;
  x1.resize(ax.size());
  y1.resize(ay.size());
  bool ok = true;
  switch (cfg.time_scheme) {
    case TimeScheme::forward_euler: {
      ok = s.euler(ax.data(), ay.data(), dt, x1.data(), y1.data());
      s.apply_boundary(x1.data(), y1.data(), ax.data(), ay.data(), t + dt);
      ax.swap(x1);
      ay.swap(y1);
      break;
    }
    case TimeScheme::ssp_rk3: {
      x2.resize(ax.size());
      y2.resize(ay.size());
      ok = s.euler(ax.data(), ay.data(), dt, x1.data(), y1.data()) && ok;
      s.apply_boundary(x1.data(), y1.data(), ax.data(), ay.data(), t + dt);
      ok = s.euler(x1.data(), y1.data(), dt, x2.data(), y2.data()) && ok;
      for (std::size_t n = 0; n < ax.size(); ++n) {
        x2[n] = 0.75 * ax[n] + 0.25 * x2[n];
        y2[n] = 0.75 * ay[n] + 0.25 * y2[n];
      }
      s.apply_boundary(x2.data(), y2.data(), ax.data(), ay.data(), t + 0.5 * dt);
      ok = s.euler(x2.data(), y2.data(), dt, x1.data(), y1.data()) && ok;
      for (std::size_t n = 0; n < ax.size(); ++n) {
        x1[n] = ax[n] / 3.0 + 2.0 * x1[n] / 3.0;
        y1[n] = ay[n] / 3.0 + 2.0 * y1[n] / 3.0;
      }
      s.apply_boundary(x1.data(), y1.data(), ax.data(), ay.data(), t + dt);
      ax.swap(x1);
      ay.swap(y1);
      break;
    }
  }
  return ok;
}

std::vector<double> copy_values(const ScalarField& f) {
  return {f.values().begin(), f.values().end()};
}

void record_checked(RunResult& result, const SolverConfig& cfg, double t,
                    const std::vector<double>& ax, const std::vector<double>& ay) {
  VectorPotentialField a(ScalarField(cfg.grid, ax), ScalarField(cfg.grid, ay));
  MagneticTwoForm b = exterior_derivative(a);
  std::vector<double> abs_b(b.bz().values().begin(), b.bz().values().end());
  std::vector<double> sq_b(abs_b);
  for (std::size_t n = 0; n < abs_b.size(); ++n) {
    sq_b[n] = abs_b[n] * abs_b[n];
    abs_b[n] = std::abs(abs_b[n]);
  }
  result.times.push_back(t);
  result.field_l1_norms.push_back(integrate_volume(ScalarField(cfg.grid, std::move(abs_b))));
  result.energy.push_back(integrate_volume(ScalarField(cfg.grid, std::move(sq_b))));
  result.divergence_max.push_back(covariant_divergence(a).max_abs());
  if (cfg.keep_snapshots) {
    result.snapshots.push_back(Snapshot{t, std::move(a), std::move(b)});
  }
}

// Values that pass the stepper but overflow in B or the norms also count as
// an instability.
void record(RunResult& result, const SolverConfig& cfg, std::size_t k, double t,
            const std::vector<double>& ax, const std::vector<double>& ay) {
  try {
    record_checked(result, cfg, t, ax, ay);
  } catch (const RangeError&) {
    throw InstabilityError(k, t);
  }
}

}  // namespace

double stability_bound(const SolverConfig& cfg) {
  const Grid& g = cfg.grid;
  double bound = std::numeric_limits<double>::infinity();
  const double y_max2 = metric_at(g.point(0, g.ny() - 1)).g_inv22;
  if (cfg.eta > 0.0) {
    const double inv_h2 = 1.0 / (g.hx() * g.hx()) + 1.0 / (g.hy() * g.hy());
    bound = std::min(bound, 1.0 / (2.0 * cfg.eta * y_max2 * inv_h2));
  }
  double ux_max = 0.0;
  double uy_max = 0.0;
  double coupling = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      // coordinate-space advection speeds U_j g^jj, as the stepper applies them
      const auto [ux, uy] = cfg.flow.at(g, i, j);
      const MetricSample m = metric_at(g.point(i, j));
      const bool lower = cfg.flow_index == FlowIndex::lowered;
      const double cx = (lower ? m.g11 * ux : ux) * m.g_inv11;
      const double cy = (lower ? m.g22 * uy : uy) * m.g_inv22;
      ux_max = std::max(ux_max, std::abs(cx));
      uy_max = std::max(uy_max, std::abs(cy));
      const double speed2 = cx * cx + cy * cy;
      if (speed2 > 0.0) coupling = std::min(coupling, 2.0 * cfg.eta * m.g_inv22 / speed2);
    }
  }
  if (ux_max > 0.0) bound = std::min(bound, g.hx() / ux_max);
  if (uy_max > 0.0) bound = std::min(bound, g.hy() / uy_max);
  if (cfg.time_scheme == TimeScheme::forward_euler) bound = std::min(bound, coupling);
  return bound;
}

ComponentPair stepper_laplacian(const VectorPotentialField& a) {
  SolverConfig cfg{.grid = a.grid(), .eta = 1.0, .boundary = BoundaryPolicy::dirichlet_zero};
  const Stepper s(cfg);
  const std::vector<double> ax = copy_values(a.ax());
  const std::vector<double> ay = copy_values(a.ay());
  std::vector<double> lx(ax.size(), 0.0);
  std::vector<double> ly(ay.size(), 0.0);
  const Grid& g = a.grid();
  for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
    s.rhs_row(i, ax.data(), ay.data(), lx.data() + i * g.ny(), ly.data() + i * g.ny());
  }
  return {ScalarField(g, std::move(lx)), ScalarField(g, std::move(ly))};
}

VectorPotentialField step(const VectorPotentialField& state, const SolverConfig& cfg, double t) {
  if (!(state.grid() == cfg.grid)) throw ConfigError("state is not on the solver grid");
  const Stepper s(cfg);
  std::vector<double> ax = copy_values(state.ax());
  std::vector<double> ay = copy_values(state.ay());
  std::vector<double> work[4];
  if (!advance(s, cfg, ax, ay, work, t, cfg.dt)) throw InstabilityError(1, t + cfg.dt);
  return {ScalarField(cfg.grid, std::move(ax)), ScalarField(cfg.grid, std::move(ay))};
}

RunResult run(const SolverConfig& cfg, const VectorPotentialField& initial) {
  if (!(initial.grid() == cfg.grid)) throw ConfigError("initial field is not on the solver grid");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be positive");
  if (!(cfg.t_end >= cfg.dt)) throw ConfigError("t_end must be at least dt");
  if (cfg.eta < 0.0) throw ConfigError("eta must be non-negative");
  if (cfg.snapshot_every == 0) throw ConfigError("snapshot_every must be positive");
  const double bound = stability_bound(cfg);
  if (cfg.dt > bound) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "dt = " << cfg.dt << " exceeds the stability bound " << bound;
    throw ConfigError(msg.str());
  }

  const Stepper s(cfg);
  RunResult result{.times = {}, .field_l1_norms = {}, .energy = {}, .divergence_max = {}, .snapshots = {}, .final_state = {}, .steps = 0, .config = cfg};
  std::vector<double> ax = copy_values(initial.ax());
  std::vector<double> ay = copy_values(initial.ay());
  std::vector<double> work[4];

  const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt * (1.0 - 1e-12)));
  record(result, cfg, 0, 0.0, ax, ay);
  double t = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_next = k == steps ? cfg.t_end : static_cast<double>(k) * cfg.dt;
    const bool ok = advance(s, cfg, ax, ay, work, t, t_next - t);
    t = t_next;
    if (!ok) throw InstabilityError(k, t);
    if (k % cfg.snapshot_every == 0 || k == steps) record(result, cfg, k, t, ax, ay);
  }
  result.steps = steps;
  result.final_state.emplace(ScalarField(cfg.grid, std::move(ax)), ScalarField(cfg.grid, std::move(ay)));
  return result;
}

}  // namespace hyperdyn
