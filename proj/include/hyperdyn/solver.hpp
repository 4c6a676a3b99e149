#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hyperdyn/fields.hpp"

namespace hyperdyn {

enum class FlowKind { vertical_profile, horizontal_constant, custom_sampled };

/// Steady prescribed flow, stored as contravariant components (U^x, U^y).
class FlowField {
 public:
  /// No flow.
  FlowField() = default;

  /// U^y = v0 y^2, U^x = 0.
  static FlowField vertical_profile(double v0);
  /// U^x = v0, U^y = 0.
  static FlowField horizontal_constant(double v0);
  static FlowField custom(ComponentPair contravariant);

  FlowKind kind() const { return kind_; }
  double v0() const { return v0_; }

  /// Contravariant components at node (i, j) of grid.
  std::pair<double, double> at(const Grid& grid, std::size_t i, std::size_t j) const;

 private:
  FlowKind kind_ = FlowKind::horizontal_constant;
  double v0_ = 0.0;
  std::optional<ComponentPair> custom_;
};

/// standard: dA/dt = adv + eta lap(A). as_written: the diffusion term carries
/// the opposite sign (anti-diffusive).
enum class DiffusionSign { standard, as_written };

enum class BoundaryPolicy {
  dirichlet_analytic,     // all edges pinned to boundary_family(p, t)
  dirichlet_zero,         // all edges held at zero
  periodic_x_dirichlet_y  // x wraps with period nx * hx; y edges pinned to the
                          // family when one is set, otherwise held at their
                          // initial values
};

enum class TimeScheme { forward_euler, ssp_rk3 };

/// Whether U_j in the advection term is the metric-lowered flow or the raw
/// contravariant components.
enum class FlowIndex { lowered, raw };

using AnalyticFamily = std::function<std::pair<double, double>(const HalfPlanePoint&, double t)>;

struct SolverConfig {
  Grid grid;
  double dt = 0.0;
  double t_end = 0.0;
  double eta = 0.0;
  FlowField flow{};
  DiffusionSign diffusion_sign = DiffusionSign::standard;
  BoundaryPolicy boundary = BoundaryPolicy::dirichlet_analytic;
  AnalyticFamily boundary_family{};
  std::size_t snapshot_every = 1;
  bool keep_snapshots = false;
  TimeScheme time_scheme = TimeScheme::forward_euler;
  FlowIndex flow_index = FlowIndex::lowered;
  /// Worker threads for the stencil update. Results do not depend on it.
  unsigned threads = 1;
};

struct Snapshot {
  double time;
  VectorPotentialField potential;
  MagneticTwoForm field;
};

struct RunResult {
  std::vector<double> times;
  /// Integral of |B_z| against the area form, per recorded time.
  std::vector<double> field_l1_norms;
  /// Integral of B_z^2 against the area form.
  std::vector<double> energy;
  /// Max |covariant_divergence(A)| over the grid.
  std::vector<double> divergence_max;
  std::vector<Snapshot> snapshots;
  /// State at t_end.
  std::optional<VectorPotentialField> final_state;
  std::size_t steps = 0;
  SolverConfig config;
};

/// U_j (A^{i,j} - A^{j,i}) for i = x, y, with A^{i,j} = g^{jk} d_k A^i.
ComponentPair advection_term(const VectorPotentialField& a, const FlowField& flow,
                             FlowIndex index = FlowIndex::lowered);

/// Largest admissible dt: the smaller of the explicit diffusive limit
/// 1 / (2 eta y_max^2 (hx^-2 + hy^-2)) and the advective limit h / |c|, where
/// c_j = U_j g^jj is the coordinate speed the advection term applies. For
/// forward Euler with a flow, central advection additionally needs
/// dt <= 2 eta y^2 / |c|^2 at every node, which is 0 when eta = 0.
/// Returns +infinity when nothing limits the step.
double stability_bound(const SolverConfig& cfg);

/// One time step from time t to t + cfg.dt. Throws InstabilityError on a
/// non-finite value.
VectorPotentialField step(const VectorPotentialField& state, const SolverConfig& cfg, double t);

/// Steps from 0 to cfg.t_end (the last step is shortened to land on t_end)
/// and records norms at t = 0, every snapshot_every steps, and at t_end.
/// Throws ConfigError when dt exceeds stability_bound.
RunResult run(const SolverConfig& cfg, const VectorPotentialField& initial);

/// The compact-stencil Laplacian the time stepper uses, exposed for testing
/// against covariant_laplacian. Edge nodes are set to zero.
ComponentPair stepper_laplacian(const VectorPotentialField& a);

}  // namespace hyperdyn
