#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyperdyn/analytic.hpp"
#include "hyperdyn/fields.hpp"
#include "hyperdyn/solver.hpp"

namespace hyperdyn::cli {

enum class Model { force_free, forced };

// automatic: vertical y^2 profile for force_free, constant horizontal flow
// for forced, both with amplitude v0 from [params].
enum class FlowChoice { automatic, none, vertical_profile, horizontal_constant };

struct GridSection {
  double x_min = 0.0;
  double x_max = 2.0;
  double y_min = 0.25;
  double y_max = 4.0;
  std::size_t nx = 128;
  std::size_t ny = 256;

  bool operator==(const GridSection&) const = default;
};

struct ParamsSection {
  Model model = Model::force_free;
  ForceFreeParams force_free{};
  ForcedParams forced{};

  bool operator==(const ParamsSection&) const = default;
};

struct SolverSection {
  std::optional<double> dt;  // explicit step; otherwise dt_fraction * stability bound
  double dt_fraction = 0.9;
  double t_end = 0.5;
  FlowChoice flow = FlowChoice::automatic;
  DiffusionSign diffusion_sign = DiffusionSign::standard;
  BoundaryPolicy boundary = BoundaryPolicy::dirichlet_analytic;
  TimeScheme time_scheme = TimeScheme::forward_euler;
  FlowIndex flow_index = FlowIndex::lowered;
  double fit_window = 0.5;

  bool operator==(const SolverSection&) const = default;
};

struct OutputSection {
  std::string directory = "out";
  std::size_t snapshot_every = 10;
  bool snapshots = false;  // B_z CSV per recorded step
  bool slices = true;      // final B_z against y at the centre x

  bool operator==(const OutputSection&) const = default;
};

struct GeometrySection {
  double fd_step = 1e-3;
  std::size_t samples = 10000;
  double x_lo = -5.0;
  double x_hi = 5.0;
  double y_lo = 0.3;
  double y_hi = 10.0;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;

  bool operator==(const GeometrySection&) const = default;
};

struct SweepSection {
  std::vector<double> etas{0.0, 0.05, 0.1, 0.2, 0.4};
  double tolerance = 0.02;
  bool reference = true;        // compare each row with a refined-y run
  std::size_t refine_y = 2;     // reference uses ny * refine_y nodes in y

  bool operator==(const SweepSection&) const = default;
};

struct RunConfig {
  GridSection grid{};
  ParamsSection params{};
  SolverSection solver{};
  OutputSection output{};
  GeometrySection geometry{};
  SweepSection sweep{};

  bool operator==(const RunConfig&) const = default;

  Grid make_grid() const;
  // Solver settings with the analytic family of the configured model; dt is
  // resolved against the stability bound.
  SolverConfig make_solver(unsigned threads) const;
  VectorPotentialField initial_field(const Grid& g) const;
};

/// Strict parse of the sectioned key = value format. Unknown sections or keys,
/// duplicate keys, non-finite numbers and a missing [params] model all throw
/// ConfigError naming the offending section.key.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Every setting written back out; parse_config(echo) reproduces the config.
std::string echo_config(const RunConfig& cfg);

/// "%.17g" formatting used by every CSV and echo.
std::string format_double(double v);

std::string to_string(Model m);
std::string to_string(FlowChoice f);
std::string to_string(DiffusionSign s);
std::string to_string(BoundaryPolicy b);
std::string to_string(TimeScheme s);
std::string to_string(FlowIndex f);

}  // namespace hyperdyn::cli
