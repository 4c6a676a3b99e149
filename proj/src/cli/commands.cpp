#include "hyperdyn/cli/commands.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <random>
#include <sstream>

#include "hyperdyn/errata.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/geometry.hpp"

namespace hyperdyn::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::ostream& log(const Context& ctx) {
  static std::ostringstream sink;
  return ctx.log ? *ctx.log : sink;
}

// Artifacts are hashed when the manifest is written, after they are closed.
class Manifest {
 public:
  Manifest(std::string command, const fs::path& dir) : dir_(dir) {
    fs::create_directories(dir_);
    doc_["command"] = std::move(command);
  }

  json& operator[](const char* key) { return doc_[key]; }

  std::ofstream open(const std::string& name) {
    names_.push_back(name);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    return out;
  }

  void write(int exit) {
    json list = json::array();
    for (const auto& n : names_) list.push_back({{"path", n}, {"sha256", sha256_file(dir_ / n)}});
    doc_["artifacts"] = std::move(list);
    doc_["exit_code"] = exit;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << doc_.dump(2) << "\n";
  }

 private:
  fs::path dir_;
  json doc_;
  std::vector<std::string> names_;
};

void put_config(Manifest& m, const RunConfig& cfg) { m["config"] = echo_config(cfg); }

void csv_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    out << (first ? "" : ",") << format_double(v);
    first = false;
  }
  out << "\n";
}

json crossings_json(const std::vector<SliceCrossings>& slices) {
  json arr = json::array();
  for (const auto& s : slices) {
    json ys = json::array();
    json signs = json::array();
    for (const auto& c : s.crossings) {
      ys.push_back(c.y);
      signs.push_back(c.sign_change);
    }
    arr.push_back({{"x", s.x}, {"y", ys}, {"sign_change", signs}});
  }
  return arr;
}

double fit_or_nan(const RunResult& r, const std::vector<double>& series, double window) {
  try {
    return fit_growth_rate(r.times, series, window).gamma_est;
  } catch (const DegenerateError&) {
    return std::nan("");
  }
}

// Least-squares line through (x, y); returns {slope, intercept}.
std::pair<double, double> affine_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (sxx == 0.0) return {std::nan(""), my};
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  EVP_MD_CTX* md = EVP_MD_CTX_new();
  EVP_DigestInit_ex(md, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(md, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(md, digest, &len);
  EVP_MD_CTX_free(md);
  std::string hex;
  char byte[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(byte, sizeof byte, "%02x", digest[k]);
    hex += byte;
  }
  return hex;
}

GeometryReport geometry_check(const GeometrySection& geo) {
  GeometryReport rep;
  rep.samples = geo.samples;
  rep.tolerance = geo.tolerance;
  std::mt19937_64 rng(geo.seed);
  std::uniform_real_distribution<double> ux(geo.x_lo, geo.x_hi);
  std::uniform_real_distribution<double> uy(geo.y_lo, geo.y_hi);
  for (std::size_t k = 0; k < geo.samples; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    const HalfPlanePoint p(x, y);
    if (gaussian_curvature_at(p) != -1.0) ++rep.exact_mismatches;
    const MetricSample m = metric_at(p);
    rep.max_inverse_error = std::max(rep.max_inverse_error, std::abs(m.g11 * m.g_inv11 - 1.0));
    rep.max_riemann_error =
        std::max(rep.max_riemann_error, std::abs(riemann_1212_at(p) / (m.g11 * m.g22) + 1.0));
    try {
      rep.max_fd_error =
          std::max(rep.max_fd_error, std::abs(gaussian_curvature_fd(p, geo.fd_step) + 1.0));
    } catch (const DomainError&) {
      ++rep.stencil_failures;
    }
  }
  rep.passed = rep.exact_mismatches == 0 && rep.stencil_failures == 0 &&
               rep.max_fd_error <= geo.tolerance && rep.max_inverse_error <= 0x1p-52 &&
               rep.max_riemann_error == 0.0;
  return rep;
}

SweepSummary sweep_eta(const RunConfig& cfg, const std::vector<double>& etas, unsigned threads) {
  if (cfg.params.model != Model::force_free) {
    throw ConfigError("params.model: sweep-eta needs the force_free model");
  }
  if (etas.empty()) throw ConfigError("sweep.etas: the eta list is empty");
  for (double eta : etas) {
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("sweep.etas: every eta must be >= 0");
  }

  auto rate = [&](RunConfig c, TimeScheme& scheme) {
    c.solver.dt.reset();
    SolverConfig sc = [&] {
      try {
        return c.make_solver(threads);
      } catch (const ConfigError&) {
        // forward Euler has no stable step for central advection without diffusion
        c.solver.time_scheme = TimeScheme::ssp_rk3;
        return c.make_solver(threads);
      }
    }();
    scheme = sc.time_scheme;
    const RunResult r = run(sc, c.initial_field(sc.grid));
    return fit_growth_rate(r.times, r.field_l1_norms, c.solver.fit_window).gamma_est;
  };

  SweepSummary sum;
  std::vector<double> xs, formula, est;
  for (double eta : etas) {
    SweepRow row;
    row.eta = eta;
    RunConfig c = cfg;
    c.params.force_free.eta = eta;
    row.gamma_formula = growth_rate(c.params.force_free);
    try {
      row.gamma_est = rate(c, row.scheme);
      row.abs_err = std::abs(row.gamma_est - row.gamma_formula);
      double oracle = row.gamma_formula;
      if (cfg.sweep.reference) {
        RunConfig fine = c;
        fine.grid.ny = c.grid.ny * cfg.sweep.refine_y;
        // the stable step shrinks with hy^2; keep the record spacing in time
        fine.output.snapshot_every = c.output.snapshot_every * cfg.sweep.refine_y * cfg.sweep.refine_y;
        TimeScheme ignored{};
        row.gamma_ref = rate(fine, ignored);
        oracle = *row.gamma_ref;
      }
      row.rel_err = std::abs(row.gamma_est - oracle) / std::max(std::abs(oracle), 1e-12);
      row.passed = row.rel_err <= cfg.sweep.tolerance;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.gamma_est = row.abs_err = row.rel_err = std::nan("");
      row.passed = false;
    }
    xs.push_back(eta);
    formula.push_back(row.gamma_formula);
    est.push_back(row.gamma_est);
    sum.rows.push_back(row);
  }
  std::tie(sum.formula_slope, sum.formula_intercept) = affine_fit(xs, formula);
  std::tie(sum.est_slope, sum.est_intercept) = affine_fit(xs, est);
  sum.passed = std::all_of(sum.rows.begin(), sum.rows.end(), [](const SweepRow& r) { return r.passed; });
  return sum;
}

std::vector<double> reversal_slices(const Grid& g) {
  std::vector<double> xs;
  const double w = g.x_max() - g.x_min();
  for (int k = 1; k <= 5; ++k) {
    double x = g.x_min() + w * k / 6.0;
    // the forced field vanishes identically on x = 0
    if (std::abs(x) < 0.5 * g.hx()) x += 0.5 * g.hx();
    xs.push_back(x);
  }
  return xs;
}

ReversalReport reversal_check(const RunConfig& cfg) {
  ReversalReport rep;
  const Grid g = cfg.make_grid();
  rep.model = cfg.params.model;
  rep.tolerance = g.hy();
  std::function<double(const HalfPlanePoint&)> bz;
  if (rep.model == Model::force_free) {
    const ForceFreeParams p = cfg.params.force_free;
    rep.expected_y0 = reversal_line_force_free();
    bz = [p](const HalfPlanePoint& q) { return force_free_bz(q, 0.0, p); };
  } else {
    const ForcedParams p = cfg.params.forced;
    if (p.gamma == 0.0) throw ConfigError("params.gamma: the forced reversal line needs gamma != 0");
    const ReversalLine line = reversal_line_forced(p);
    rep.expected_y0 = line.y0;
    rep.physical = line.physical;
    bz = [p](const HalfPlanePoint& q) { return forced_bz(q, 0.0, p); };
  }
  rep.inside_grid = rep.physical && rep.expected_y0 >= g.y_min() && rep.expected_y0 <= g.y_max();
  const MagneticTwoForm b(ScalarField::sample(g, bz));
  rep.passed = true;
  for (double x : reversal_slices(g)) {
    SliceCrossings s{x, reversal_scan(b, x)};
    const bool ok = rep.inside_grid ? s.crossings.size() == 1 &&
                                          std::abs(s.crossings[0].y - rep.expected_y0) <= rep.tolerance
                                    : s.crossings.empty();
    rep.passed = rep.passed && ok;
    rep.slices.push_back(std::move(s));
  }
  return rep;
}

int cmd_geometry_check(const RunConfig& cfg, const Context& ctx) {
  const GeometryReport rep = geometry_check(cfg.geometry);
  Manifest m("geometry-check", ctx.out_dir);
  put_config(m, cfg);
  {
    auto out = m.open("geometry_report.json");
    const json r{{"samples", rep.samples},
                 {"fd_step", cfg.geometry.fd_step},
                 {"tolerance", rep.tolerance},
                 {"exact_mismatches", rep.exact_mismatches},
                 {"max_fd_error", rep.max_fd_error},
                 {"stencil_failures", rep.stencil_failures},
                 {"max_inverse_error", rep.max_inverse_error},
                 {"max_riemann_error", rep.max_riemann_error},
                 {"passed", rep.passed}};
    out << r.dump(2) << "\n";
  }
  m["diagnostics"] = {{"passed", rep.passed}, {"max_fd_error", rep.max_fd_error}};
  const int code = rep.passed ? exit_code::ok : exit_code::check_failed;
  m.write(code);
  log(ctx) << "geometry-check: " << rep.samples << " points, max |K_fd + 1| = "
           << format_double(rep.max_fd_error) << " (tolerance " << format_double(rep.tolerance)
           << "), stencil failures " << rep.stencil_failures << ", exact mismatches "
           << rep.exact_mismatches << (rep.passed ? "  PASS\n" : "  FAIL\n");
  return code;
}

int cmd_evolve(const RunConfig& cfg, const Context& ctx) {
  SolverConfig sc = cfg.make_solver(ctx.threads);
  sc.keep_snapshots = cfg.output.snapshots;
  const VectorPotentialField init = cfg.initial_field(sc.grid);
  const double bound = stability_bound(sc);
  if (sc.dt > bound) {
    throw ConfigError("solver.dt = " + format_double(sc.dt) + " exceeds the stability bound " +
                      format_double(bound));
  }

  Manifest m("evolve", ctx.out_dir);
  put_config(m, cfg);
  m["solver"] = {{"dt", sc.dt}, {"stability_bound", bound}, {"time_scheme", to_string(sc.time_scheme)}};

  std::optional<RunResult> res;
  try {
    res.emplace(run(sc, init));
  } catch (const InstabilityError& e) {
    m["instability"] = {{"step", e.step()}, {"time", e.time()}};
    m.write(exit_code::instability);
    log(ctx) << "evolve: instability at step " << e.step() << " (t = " << format_double(e.time())
             << ")\n";
    return exit_code::instability;
  }
  const RunResult& r = *res;
  m["solver"]["steps"] = r.steps;

  {
    auto out = m.open("norms.csv");
    out << "t,l1_norm,energy,divergence_max\n";
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      csv_row(out, {r.times[k], r.field_l1_norms[k], r.energy[k], r.divergence_max[k]});
    }
  }
  const MagneticTwoForm final_b = exterior_derivative(*r.final_state);
  if (cfg.output.slices) {
    auto out = m.open("bz_slice.csv");
    const Grid& g = sc.grid;
    const std::size_t i = g.nx() / 2;
    m["slice"] = {{"x", g.x(i)}, {"t", r.times.back()}};
    out << "y,bz\n";
    for (std::size_t j = 0; j < g.ny(); ++j) csv_row(out, {g.y(j), final_b.bz()(i, j)});
  }
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "bz_%06zu.csv", k);
    auto out = m.open(name);
    write_csv(out, r.snapshots[k].field.bz());
  }

  json d;
  const double window = cfg.solver.fit_window;
  const double gamma_est = fit_or_nan(r, r.field_l1_norms, window);
  const bool ff = cfg.params.model == Model::force_free;
  const double gamma_formula = ff ? growth_rate(cfg.params.force_free) : cfg.params.forced.gamma;
  d["gamma_est"] = gamma_est;
  d["gamma_formula"] = gamma_formula;
  d["gamma_rel_error"] = std::abs(gamma_est - gamma_formula) / std::max(std::abs(gamma_formula), 1e-12);
  d["energy_rate"] = fit_or_nan(r, r.energy, window);
  d["expected_energy_rate"] = 2.0 * gamma_formula;
  if (ff) {
    const ForceFreeParams& p = cfg.params.force_free;
    if (p.k_sep > 0.0) {
      const EntropyCheck e = entropy_bound_check(p, gamma_est);
      d["entropy"] = {{"htop_lower_bound", e.htop_lower_bound},
                      {"v0_threshold", e.v0_threshold},
                      {"rate_matches", e.rate_matches},
                      {"fast_dynamo", e.fast_dynamo},
                      {"v0_above_threshold", e.v0_above_threshold},
                      {"consistent", e.consistent()}};
    }
  }
  std::vector<SliceCrossings> slices;
  for (double x : reversal_slices(sc.grid)) slices.push_back({x, reversal_scan(final_b, x)});
  d["reversal_crossings_final"] = crossings_json(slices);
  const double div0 = r.divergence_max.front();
  const double div_max = *std::max_element(r.divergence_max.begin(), r.divergence_max.end());
  d["divergence"] = {{"initial", div0},
                     {"max", div_max},
                     {"final", r.divergence_max.back()},
                     {"max_over_initial", div0 > 0.0 ? div_max / div0 : std::nan("")}};
  m["diagnostics"] = d;
  m.write(exit_code::ok);
  log(ctx) << "evolve: " << r.steps << " steps, gamma_est = " << format_double(gamma_est)
           << ", gamma_formula = " << format_double(gamma_formula) << "\n";
  return exit_code::ok;
}

int cmd_sweep_eta(const RunConfig& cfg, const std::vector<double>& etas, const Context& ctx) {
  const SweepSummary sum = sweep_eta(cfg, etas, ctx.threads);
  Manifest m("sweep-eta", ctx.out_dir);
  put_config(m, cfg);
  {
    auto out = m.open("sweep.csv");
    out << "eta,gamma_formula,gamma_est,abs_err\n";
    for (const auto& row : sum.rows) csv_row(out, {row.eta, row.gamma_formula, row.gamma_est, row.abs_err});
  }
  json rows = json::array();
  for (const auto& row : sum.rows) {
    json j{{"eta", row.eta},
           {"gamma_formula", row.gamma_formula},
           {"gamma_est", row.gamma_est},
           {"abs_err", row.abs_err},
           {"gamma_ref", row.gamma_ref ? json(*row.gamma_ref) : json(nullptr)},
           {"rel_err", row.rel_err},
           {"time_scheme", to_string(row.scheme)},
           {"passed", row.passed}};
    if (!row.error.empty()) j["error"] = row.error;
    rows.push_back(std::move(j));
  }
  m["rows"] = rows;
  m["diagnostics"] = {{"formula_slope", sum.formula_slope},
                      {"formula_intercept", sum.formula_intercept},
                      {"est_slope", sum.est_slope},
                      {"est_intercept", sum.est_intercept},
                      {"oracle", cfg.sweep.reference ? "reference" : "formula"},
                      {"tolerance", cfg.sweep.tolerance},
                      {"passed", sum.passed}};
  const int code = sum.passed ? exit_code::ok : exit_code::check_failed;
  m.write(code);
  for (const auto& row : sum.rows) {
    log(ctx) << "sweep-eta: eta = " << format_double(row.eta) << "  formula "
             << format_double(row.gamma_formula) << "  est " << format_double(row.gamma_est)
             << (row.passed ? "  ok\n" : "  FAIL\n");
  }
  log(ctx) << "sweep-eta: slope " << format_double(sum.est_slope) << ", intercept "
           << format_double(sum.est_intercept) << "\n";
  return code;
}

int cmd_reversal(const RunConfig& cfg, const Context& ctx) {
  const ReversalReport rep = reversal_check(cfg);
  Manifest m("reversal", ctx.out_dir);
  put_config(m, cfg);
  {
    auto out = m.open("reversal.json");
    const json r{{"model", to_string(rep.model)},
                 {"expected_y0", rep.expected_y0},
                 {"physical", rep.physical},
                 {"inside_grid", rep.inside_grid},
                 {"tolerance", rep.tolerance},
                 {"slices", crossings_json(rep.slices)},
                 {"passed", rep.passed}};
    out << r.dump(2) << "\n";
  }
  const int code = rep.passed ? exit_code::ok : exit_code::check_failed;
  m["diagnostics"] = {{"passed", rep.passed}, {"physical", rep.physical}};
  m.write(code);
  if (!rep.physical) {
    log(ctx) << "reversal: no physical reversal line (y0 = " << format_double(rep.expected_y0)
             << " <= 0)";
  } else {
    log(ctx) << "reversal: expected y0 = " << format_double(rep.expected_y0);
  }
  log(ctx) << (rep.passed ? "  PASS\n" : "  FAIL\n");
  return code;
}

int cmd_errata(const RunConfig& cfg, const Context& ctx) {
  ErrataSettings s;
  s.grid = cfg.make_grid();
  if (cfg.params.model == Model::force_free) s.force_free = cfg.params.force_free;
  if (cfg.params.model == Model::forced) s.forced = cfg.params.forced;
  s.threads = ctx.threads;
  const std::vector<ErrataEntry> entries = run_errata(s);

  json arr = json::array();
  for (const auto& e : entries) {
    json meas = json::object();
    for (const auto& [k, v] : e.measurements) meas[k] = v;
    arr.push_back({{"id", e.id},
                   {"location", e.location},
                   {"finding", e.finding},
                   {"readings",
                    {{{"name", e.first.name}, {"expression", e.first.expression}, {"value", e.first.value}},
                     {{"name", e.second.name},
                      {"expression", e.second.expression},
                      {"value", e.second.value}}}},
                   {"measurements", meas}});
  }
  Manifest m("errata", ctx.out_dir);
  put_config(m, cfg);
  {
    auto out = m.open("errata.json");
    out << json{{"entries", arr}}.dump(2) << "\n";
  }
  m["diagnostics"] = {{"entries", entries.size()}};
  m.write(exit_code::ok);
  for (const auto& e : entries) {
    log(ctx) << "errata: " << e.id << ": " << e.first.name << " = " << format_double(e.first.value)
             << ", " << e.second.name << " = " << format_double(e.second.value) << "\n";
  }
  return exit_code::ok;
}

int cmd_deviation(const DeviationArgs& a, const Context& ctx) {
  if (!(a.s_end > 0.0) || !std::isfinite(a.s_end)) throw ConfigError("--s-end must be positive");
  if (a.n_steps < 10) throw ConfigError("--n-steps must be at least 10");
  if (!std::isfinite(a.j0) || !std::isfinite(a.dj0)) throw ConfigError("--j0/--dj0 must be finite");
  if (!(a.tolerance > 0.0)) throw ConfigError("--tolerance must be positive");

  const auto samples = integrate_deviation(a.j0, a.dj0, a.s_end, a.n_steps);
  auto closed = [&](double s) { return deviation_solution(s, a.dj0) + a.j0 * std::cosh(s); };
  Manifest m("deviation", ctx.out_dir);
  double max_abs = 0.0, max_rel = 0.0;
  {
    auto out = m.open("deviation.csv");
    out << "s,J_numeric,J_closed_form,abs_err\n";
    for (const auto& smp : samples) {
      const double c = closed(smp.s);
      const double err = std::abs(smp.j - c);
      max_abs = std::max(max_abs, err);
      if (c != 0.0) max_rel = std::max(max_rel, err / std::abs(c));
      else max_rel = std::max(max_rel, err);
      csv_row(out, {smp.s, smp.j, c, err});
    }
  }
  // J(s_end) / J(s_end - 1) tends to e as sinh stretches
  double ratio = std::nan("");
  if (a.s_end >= 1.0) {
    const double ds = a.s_end / static_cast<double>(a.n_steps);
    const auto back = static_cast<std::size_t>(std::llround(1.0 / ds));
    if (back <= a.n_steps && samples[a.n_steps - back].j != 0.0) {
      ratio = samples.back().j / samples[a.n_steps - back].j;
    }
  }
  const bool ok = max_rel <= a.tolerance;
  m["arguments"] = {{"s_end", a.s_end}, {"n_steps", a.n_steps}, {"j0", a.j0}, {"dj0", a.dj0},
                    {"tolerance", a.tolerance}};
  m["diagnostics"] = {{"max_abs_error", max_abs},
                      {"max_rel_error", max_rel},
                      {"stretching_ratio_last_unit", ratio},
                      {"passed", ok}};
  const int code = ok ? exit_code::ok : exit_code::check_failed;
  m.write(code);
  log(ctx) << "deviation: max relative error " << format_double(max_rel)
           << (ok ? "  PASS\n" : "  FAIL\n");
  return code;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kinematic dynamo laboratory on the hyperbolic half-plane", "hyperdyn"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_flag;
  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration file")->required();
    sub->add_option("--out", out_flag, "Output directory");
  };
  auto* geometry = app.add_subcommand("geometry-check", "Curvature and metric invariants");
  auto* evolve = app.add_subcommand("evolve", "Time-step the induction equation");
  auto* sweep = app.add_subcommand("sweep-eta", "Growth rate against diffusivity");
  auto* reversal = app.add_subcommand("reversal", "Locate the field reversal line");
  auto* errata = app.add_subcommand("errata", "Evaluate both readings of each discrepancy");
  for (auto* sub : {geometry, evolve, sweep, reversal, errata}) with_config(sub);
  std::vector<double> etas;
  sweep->add_option("--eta", etas, "Diffusivities (overrides [sweep] etas)")->delimiter(',');

  DeviationArgs dev;
  auto* deviation = app.add_subcommand("deviation", "Integrate the geodesic deviation equation");
  deviation->add_option("--s-end", dev.s_end, "End of the arc-length interval");
  deviation->add_option("--n-steps", dev.n_steps, "RK4 steps");
  deviation->add_option("--j0", dev.j0, "J(0)");
  deviation->add_option("--dj0", dev.dj0, "J'(0)");
  deviation->add_option("--tolerance", dev.tolerance, "Max relative error for success");
  deviation->add_option("--out", out_flag, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_code::ok : exit_code::usage;
  }

  Context ctx;
  ctx.log = &out;
  if (const char* t = std::getenv("HYPERDYN_THREADS")) {
    const std::string s(t);
    unsigned v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v == 0) {
      err << "error: HYPERDYN_THREADS must be a positive integer\n";
      return exit_code::usage;
    }
    ctx.threads = v;
  }
  auto resolve_out = [&](const std::string& configured) {
    if (!out_flag.empty()) return fs::path(out_flag);
    if (const char* env = std::getenv("HYPERDYN_OUT_DIR"); env && *env) return fs::path(env);
    return fs::path(configured);
  };

  try {
    if (deviation->parsed()) {
      ctx.out_dir = resolve_out("out");
      return cmd_deviation(dev, ctx);
    }
    const RunConfig cfg = load_config(config_path);
    ctx.out_dir = resolve_out(cfg.output.directory);
    if (geometry->parsed()) return cmd_geometry_check(cfg, ctx);
    if (evolve->parsed()) return cmd_evolve(cfg, ctx);
    if (sweep->parsed()) return cmd_sweep_eta(cfg, sweep->count("--eta") ? etas : cfg.sweep.etas, ctx);
    if (reversal->parsed()) return cmd_reversal(cfg, ctx);
    if (errata->parsed()) return cmd_errata(cfg, ctx);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::check_failed;
  }
  return exit_code::usage;
}

}  // namespace hyperdyn::cli
