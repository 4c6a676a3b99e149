#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyperdyn/cli/config.hpp"
#include "hyperdyn/diagnostics.hpp"

namespace hyperdyn::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int usage = 2;
inline constexpr int instability = 3;
}  // namespace exit_code

struct Context {
  std::filesystem::path out_dir;
  unsigned threads = 1;
  std::ostream* log = nullptr;
};

struct GeometryReport {
  std::size_t samples = 0;
  std::size_t exact_mismatches = 0;   // gaussian_curvature_at != -1
  double max_fd_error = 0.0;          // |K_fd + 1| over points whose stencil fits
  std::size_t stencil_failures = 0;   // points where the FD stencil leaves the chart
  double max_inverse_error = 0.0;     // |g11 g^11 - 1|
  double max_riemann_error = 0.0;     // |R1212 / (g11 g22) + 1|
  double tolerance = 0.0;
  bool passed = false;
};

GeometryReport geometry_check(const GeometrySection& geo);

struct SweepRow {
  double eta = 0.0;
  double gamma_formula = 0.0;
  double gamma_est = 0.0;
  double abs_err = 0.0;  // |gamma_est - gamma_formula|
  std::optional<double> gamma_ref;
  double rel_err = 0.0;  // against the reference when there is one, else the formula
  TimeScheme scheme = TimeScheme::forward_euler;
  bool passed = false;
  std::string error;
};

struct SweepSummary {
  std::vector<SweepRow> rows;
  double formula_slope = 0.0;
  double formula_intercept = 0.0;
  double est_slope = 0.0;
  double est_intercept = 0.0;
  bool passed = false;
};

/// One growth-rate run per eta on the configured grid (force_free model only).
/// A row whose configured scheme has no stable step (forward Euler, eta = 0)
/// runs with ssp_rk3.
SweepSummary sweep_eta(const RunConfig& cfg, const std::vector<double>& etas, unsigned threads);

struct SliceCrossings {
  double x;
  std::vector<Crossing> crossings;
};

struct ReversalReport {
  Model model = Model::force_free;
  double expected_y0 = 0.0;
  bool physical = true;
  bool inside_grid = true;
  double tolerance = 0.0;
  std::vector<SliceCrossings> slices;
  bool passed = false;
};

/// x positions of the reversal slices: five interior verticals, none at x = 0.
std::vector<double> reversal_slices(const Grid& g);

ReversalReport reversal_check(const RunConfig& cfg);

struct DeviationArgs {
  double s_end = 5.0;
  std::size_t n_steps = 10000;
  double j0 = 0.0;
  double dj0 = 1.0;
  double tolerance = 1e-8;  // max relative error
};

int cmd_geometry_check(const RunConfig& cfg, const Context& ctx);
int cmd_evolve(const RunConfig& cfg, const Context& ctx);
int cmd_sweep_eta(const RunConfig& cfg, const std::vector<double>& etas, const Context& ctx);
int cmd_reversal(const RunConfig& cfg, const Context& ctx);
int cmd_errata(const RunConfig& cfg, const Context& ctx);
int cmd_deviation(const DeviationArgs& args, const Context& ctx);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Full command line: subcommand parsing, environment overrides, exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyperdyn::cli
