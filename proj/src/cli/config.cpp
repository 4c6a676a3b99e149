#include "hyperdyn/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hyperdyn/errors.hpp"

namespace hyperdyn::cli {

namespace pt = boost::property_tree;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(Model m) { return m == Model::force_free ? "force_free" : "forced"; }

std::string to_string(FlowChoice f) {
  switch (f) {
    case FlowChoice::automatic: return "auto";
    case FlowChoice::none: return "none";
    case FlowChoice::vertical_profile: return "vertical_profile";
    case FlowChoice::horizontal_constant: return "horizontal_constant";
  }
  return "?";
}

std::string to_string(DiffusionSign s) {
  return s == DiffusionSign::standard ? "standard" : "as_written";
}

std::string to_string(BoundaryPolicy b) {
  switch (b) {
    case BoundaryPolicy::dirichlet_analytic: return "dirichlet_analytic";
    case BoundaryPolicy::dirichlet_zero: return "dirichlet_zero";
    case BoundaryPolicy::periodic_x_dirichlet_y: return "periodic_x_dirichlet_y";
  }
  return "?";
}

std::string to_string(TimeScheme s) {
  return s == TimeScheme::forward_euler ? "forward_euler" : "ssp_rk3";
}

std::string to_string(FlowIndex f) { return f == FlowIndex::lowered ? "lowered" : "raw"; }

namespace {

template <typename E>
E parse_enum(const std::string& where, const std::string& text, std::initializer_list<E> options) {
  std::string allowed;
  for (E e : options) {
    if (to_string(e) == text) return e;
    allowed += (allowed.empty() ? "" : ", ") + to_string(e);
  }
  throw ConfigError(where + ": '" + text + "' is not one of " + allowed);
}

double parse_real(const std::string& where, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError(where + ": '" + text + "' is not a number");
  if (!std::isfinite(v)) throw ConfigError(where + ": value must be finite");
  return v;
}

template <typename U>
U parse_unsigned(const std::string& where, const std::string& text) {
  U v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(where + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

bool parse_bool(const std::string& where, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(where + ": '" + text + "' is not true or false");
}

// Reads keys of one section and rejects anything it did not ask for.
class Section {
 public:
  Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (const auto child = root.get_child_optional(name_)) tree_ = &*child;
  }

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    seen_.insert(key);
    if (!tree_) return std::nullopt;
    const auto v = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return v->data();
  }

  void real(const std::string& key, double& out) {
    if (auto v = raw(key)) out = parse_real(where(key), *v);
  }
  void real(const std::string& key, std::optional<double>& out) {
    if (auto v = raw(key)) out = parse_real(where(key), *v);
  }
  template <typename U>
  void count(const std::string& key, U& out) {
    if (auto v = raw(key)) out = parse_unsigned<U>(where(key), *v);
  }
  void flag(const std::string& key, bool& out) {
    if (auto v = raw(key)) out = parse_bool(where(key), *v);
  }
  void text(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }
  template <typename E>
  void choice(const std::string& key, E& out, std::initializer_list<E> options) {
    if (auto v = raw(key)) out = parse_enum(where(key), *v, options);
  }
  void reals(const std::string& key, std::vector<double>& out) {
    auto v = raw(key);
    if (!v) return;
    out.clear();
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) throw ConfigError(where(key) + ": empty list item");
      out.push_back(parse_real(where(key), item.substr(b, e - b + 1)));
    }
  }

  std::string where(const std::string& key) const { return name_ + "." + key; }

  void finish() const {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!child.empty()) throw ConfigError(where(key) + ": nested keys are not allowed");
      if (!seen_.contains(key)) throw ConfigError(where(key) + ": unknown key");
    }
  }

 private:
  std::string name_;
  const pt::ptree* tree_ = nullptr;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw ConfigError(where + ": " + what);
}

void validate(const RunConfig& c) {
  const GridSection& g = c.grid;
  require(g.y_min > 0.0, "grid.y_min", "must be positive (got " + format_double(g.y_min) + ")");
  require(g.y_max > g.y_min, "grid.y_max", "must exceed grid.y_min");
  require(g.x_max > g.x_min, "grid.x_max", "must exceed grid.x_min");
  require(g.nx >= 4, "grid.nx", "must be at least 4");
  require(g.ny >= 4, "grid.ny", "must be at least 4");

  const auto& ff = c.params.force_free;
  const auto& fo = c.params.forced;
  if (c.params.model == Model::force_free) {
    require(ff.eta >= 0.0, "params.eta", "must be non-negative");
  } else {
    require(fo.eta >= 0.0, "params.eta", "must be non-negative");
  }

  const SolverSection& s = c.solver;
  if (s.dt) require(*s.dt > 0.0, "solver.dt", "must be positive");
  require(s.dt_fraction > 0.0 && s.dt_fraction <= 1.0, "solver.dt_fraction", "must be in (0, 1]");
  require(s.t_end > 0.0, "solver.t_end", "must be positive (got " + format_double(s.t_end) + ")");
  if (s.dt) require(s.t_end >= *s.dt, "solver.t_end", "must be at least solver.dt");
  require(s.fit_window > 0.0 && s.fit_window <= 1.0, "solver.fit_window", "must be in (0, 1]");

  require(c.output.snapshot_every > 0, "output.snapshot_every", "must be positive");
  require(!c.output.directory.empty(), "output.directory", "must not be empty");

  const GeometrySection& geo = c.geometry;
  require(geo.fd_step > 0.0, "geometry.fd_step", "must be positive");
  require(geo.samples > 0, "geometry.samples", "must be positive");
  require(geo.x_hi > geo.x_lo, "geometry.x_hi", "must exceed geometry.x_lo");
  require(geo.y_lo > 0.0, "geometry.y_lo", "must be positive");
  require(geo.y_hi > geo.y_lo, "geometry.y_hi", "must exceed geometry.y_lo");
  require(geo.tolerance > 0.0, "geometry.tolerance", "must be positive");

  for (double eta : c.sweep.etas) require(eta >= 0.0, "sweep.etas", "every eta must be >= 0");
  require(c.sweep.tolerance > 0.0, "sweep.tolerance", "must be positive");
  require(c.sweep.refine_y >= 1, "sweep.refine_y", "must be at least 1");
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  static const std::set<std::string> sections{"grid",   "params",   "solver",
                                              "output", "geometry", "sweep"};
  for (const auto& [name, child] : root) {
    if (child.empty()) throw ConfigError(name + ": key outside any section");
    if (!sections.contains(name)) throw ConfigError(name + ": unknown section");
  }

  RunConfig c;
  Section grid(root, "grid");
  grid.real("x_min", c.grid.x_min);
  grid.real("x_max", c.grid.x_max);
  grid.real("y_min", c.grid.y_min);
  grid.real("y_max", c.grid.y_max);
  grid.count("nx", c.grid.nx);
  grid.count("ny", c.grid.ny);
  grid.finish();

  Section params(root, "params");
  const auto model = params.raw("model");
  if (!model) throw ConfigError("params.model: required (force_free or forced)");
  c.params.model = parse_enum(params.where("model"), *model, {Model::force_free, Model::forced});
  if (c.params.model == Model::force_free) {
    auto& p = c.params.force_free;
    params.real("a0", p.a0);
    params.real("k_sep", p.k_sep);
    params.real("lambda", p.lambda);
    params.real("eta", p.eta);
    params.real("v0", p.v0);
  } else {
    auto& p = c.params.forced;
    params.real("gamma", p.gamma);
    params.real("v0", p.v0);
    params.real("eta", p.eta);
  }
  params.finish();

  Section solver(root, "solver");
  auto& s = c.solver;
  solver.real("dt", s.dt);
  solver.real("dt_fraction", s.dt_fraction);
  solver.real("t_end", s.t_end);
  solver.choice("flow", s.flow,
                {FlowChoice::automatic, FlowChoice::none, FlowChoice::vertical_profile,
                 FlowChoice::horizontal_constant});
  solver.choice("diffusion_sign", s.diffusion_sign,
                {DiffusionSign::standard, DiffusionSign::as_written});
  solver.choice("boundary", s.boundary,
                {BoundaryPolicy::dirichlet_analytic, BoundaryPolicy::dirichlet_zero,
                 BoundaryPolicy::periodic_x_dirichlet_y});
  solver.choice("time_scheme", s.time_scheme, {TimeScheme::forward_euler, TimeScheme::ssp_rk3});
  solver.choice("flow_index", s.flow_index, {FlowIndex::lowered, FlowIndex::raw});
  solver.real("fit_window", s.fit_window);
  solver.finish();

  Section output(root, "output");
  output.text("directory", c.output.directory);
  output.count("snapshot_every", c.output.snapshot_every);
  output.flag("snapshots", c.output.snapshots);
  output.flag("slices", c.output.slices);
  output.finish();

  Section geometry(root, "geometry");
  auto& geo = c.geometry;
  geometry.real("fd_step", geo.fd_step);
  geometry.count("samples", geo.samples);
  geometry.real("x_lo", geo.x_lo);
  geometry.real("x_hi", geo.x_hi);
  geometry.real("y_lo", geo.y_lo);
  geometry.real("y_hi", geo.y_hi);
  geometry.count("seed", geo.seed);
  geometry.real("tolerance", geo.tolerance);
  geometry.finish();

  Section sweep(root, "sweep");
  sweep.reals("etas", c.sweep.etas);
  sweep.real("tolerance", c.sweep.tolerance);
  sweep.flag("reference", c.sweep.reference);
  sweep.count("refine_y", c.sweep.refine_y);
  sweep.finish();

  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream o;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << "\n"; };
  auto num = [&](const char* k, double v) { kv(k, format_double(v)); };
  auto cnt = [&](const char* k, std::uint64_t v) { kv(k, std::to_string(v)); };
  auto flag = [&](const char* k, bool v) { kv(k, v ? "true" : "false"); };

  o << "[grid]\n";
  num("x_min", c.grid.x_min);
  num("x_max", c.grid.x_max);
  num("y_min", c.grid.y_min);
  num("y_max", c.grid.y_max);
  cnt("nx", c.grid.nx);
  cnt("ny", c.grid.ny);

  o << "\n[params]\n";
  kv("model", to_string(c.params.model));
  if (c.params.model == Model::force_free) {
    const auto& p = c.params.force_free;
    num("a0", p.a0);
    num("k_sep", p.k_sep);
    num("lambda", p.lambda);
    num("eta", p.eta);
    num("v0", p.v0);
  } else {
    const auto& p = c.params.forced;
    num("gamma", p.gamma);
    num("v0", p.v0);
    num("eta", p.eta);
  }

  o << "\n[solver]\n";
  const auto& s = c.solver;
  if (s.dt) num("dt", *s.dt);
  num("dt_fraction", s.dt_fraction);
  num("t_end", s.t_end);
  kv("flow", to_string(s.flow));
  kv("diffusion_sign", to_string(s.diffusion_sign));
  kv("boundary", to_string(s.boundary));
  kv("time_scheme", to_string(s.time_scheme));
  kv("flow_index", to_string(s.flow_index));
  num("fit_window", s.fit_window);

  o << "\n[output]\n";
  kv("directory", c.output.directory);
  cnt("snapshot_every", c.output.snapshot_every);
  flag("snapshots", c.output.snapshots);
  flag("slices", c.output.slices);

  o << "\n[geometry]\n";
  const auto& geo = c.geometry;
  num("fd_step", geo.fd_step);
  cnt("samples", geo.samples);
  num("x_lo", geo.x_lo);
  num("x_hi", geo.x_hi);
  num("y_lo", geo.y_lo);
  num("y_hi", geo.y_hi);
  cnt("seed", geo.seed);
  num("tolerance", geo.tolerance);

  o << "\n[sweep]\n";
  std::string etas;
  for (double e : c.sweep.etas) etas += (etas.empty() ? "" : ", ") + format_double(e);
  kv("etas", etas);
  num("tolerance", c.sweep.tolerance);
  flag("reference", c.sweep.reference);
  cnt("refine_y", c.sweep.refine_y);
  return o.str();
}

Grid RunConfig::make_grid() const {
  return {grid.x_min, grid.x_max, grid.y_min, grid.y_max, grid.nx, grid.ny};
}

SolverConfig RunConfig::make_solver(unsigned threads) const {
  SolverConfig cfg{.grid = make_grid()};
  cfg.t_end = solver.t_end;
  cfg.diffusion_sign = solver.diffusion_sign;
  cfg.boundary = solver.boundary;
  cfg.time_scheme = solver.time_scheme;
  cfg.flow_index = solver.flow_index;
  cfg.snapshot_every = output.snapshot_every;
  cfg.threads = threads;

  const bool ff = params.model == Model::force_free;
  const double v0 = ff ? params.force_free.v0 : params.forced.v0;
  cfg.eta = ff ? params.force_free.eta : params.forced.eta;
  FlowChoice flow = solver.flow;
  if (flow == FlowChoice::automatic) {
    flow = ff ? FlowChoice::vertical_profile : FlowChoice::horizontal_constant;
  }
  switch (flow) {
    case FlowChoice::vertical_profile: cfg.flow = FlowField::vertical_profile(v0); break;
    case FlowChoice::horizontal_constant: cfg.flow = FlowField::horizontal_constant(v0); break;
    default: cfg.flow = FlowField{}; break;
  }

  if (ff) {
    const ForceFreeParams p = params.force_free;
    cfg.boundary_family = [p](const HalfPlanePoint& q, double t) {
      return force_free_potential(q, t, p);
    };
  } else {
    const ForcedParams p = params.forced;
    cfg.boundary_family = [p](const HalfPlanePoint& q, double t) {
      return std::pair{forced_potential(q, t, p), 0.0};
    };
  }
  if (cfg.boundary == BoundaryPolicy::dirichlet_zero) cfg.boundary_family = nullptr;

  if (solver.dt) {
    cfg.dt = *solver.dt;
  } else {
    const double bound = stability_bound(cfg);
    if (bound == 0.0) {
      throw ConfigError(
          "solver.time_scheme: forward_euler with a flow and eta = 0 has no stable step; use "
          "ssp_rk3");
    }
    if (!std::isfinite(bound)) {
      throw ConfigError("solver.dt: nothing limits the step (no flow, eta = 0); set dt explicitly");
    }
    cfg.dt = solver.dt_fraction * bound;
  }
  return cfg;
}

VectorPotentialField RunConfig::initial_field(const Grid& g) const {
  if (params.model == Model::force_free) {
    const ForceFreeParams p = params.force_free;
    return VectorPotentialField::sample(
        g, [&](const HalfPlanePoint& q) { return force_free_potential(q, 0.0, p); });
  }
  const ForcedParams p = params.forced;
  return VectorPotentialField::sample(
      g, [&](const HalfPlanePoint& q) { return std::pair{forced_potential(q, 0.0, p), 0.0}; });
}

}  // namespace hyperdyn::cli
