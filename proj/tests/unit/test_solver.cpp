#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hyperdyn/analytic.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/solver.hpp"
#include "oracles.hpp"

using namespace hyperdyn;

namespace {

// Smooth mode that vanishes on the edges of [0,1] x [1,2].
VectorPotentialField windowed(const Grid& g, double scale = 1.0) {
  return VectorPotentialField::sample(g, [scale](const HalfPlanePoint& p) {
    using std::numbers::pi;
    const double w = std::sin(pi * p.x()) * std::sin(pi * (p.y() - 1.0));
    return std::pair{scale * 0.5 * w, scale * p.y() * p.y() * w};
  });
}

SolverConfig decay_config(const Grid& g) {
  SolverConfig cfg{.grid = g, .eta = 0.1, .boundary = BoundaryPolicy::dirichlet_zero};
  cfg.dt = 0.9 * stability_bound(cfg);
  cfg.t_end = 60 * cfg.dt;
  return cfg;
}

bool same_values(const ScalarField& a, const ScalarField& b) {
  for (std::size_t n = 0; n < a.values().size(); ++n) {
    if (a.values()[n] != b.values()[n]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("advection term") {
  const Grid g(0.0, 1.0, 0.5, 2.0, 12, 16);

  SUBCASE("no flow gives zero") {
    const auto a = VectorPotentialField::sample(
        g, [](const HalfPlanePoint& p) { return std::pair{p.x() * p.y(), p.y() * p.y()}; });
    const ComponentPair t = advection_term(a, FlowField{});
    CHECK(t.x.max_abs() == 0.0);
    CHECK(t.y.max_abs() == 0.0);
  }

  SUBCASE("A^x(y) under a horizontal flow drives only the y component") {
    // U_x = g_xx v0, so U_x (A^{y,x} - A^{x,y}) = -v0 d_y A^x = -2 v0 y for A^x = y^2.
    const double v0 = 2.0;
    const auto a = VectorPotentialField::sample(
        g, [](const HalfPlanePoint& p) { return std::pair{p.y() * p.y(), 0.0}; });
    const ComponentPair t = advection_term(a, FlowField::horizontal_constant(v0));
    CHECK(t.x.max_abs() == 0.0);
    for (std::size_t i = 0; i < g.nx(); ++i) {
      for (std::size_t j = 0; j < g.ny(); ++j) {
        REQUIRE(t.y(i, j) == doctest::Approx(-2.0 * v0 * g.y(j)).epsilon(1e-12));
      }
    }
  }

  SUBCASE("A^x(y) under the vertical flow is U_y g^yy d_y A^x") {
    // A^x = y^2: central differences are exact, U_y = g_yy v0 y^2 = v0.
    const double v0 = 1.5;
    const auto a = VectorPotentialField::sample(
        g, [](const HalfPlanePoint& p) { return std::pair{p.y() * p.y(), 0.0}; });
    const ComponentPair low = advection_term(a, FlowField::vertical_profile(v0));
    const ComponentPair raw = advection_term(a, FlowField::vertical_profile(v0), FlowIndex::raw);
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> ui(1, g.nx() - 2), uj(1, g.ny() - 2);
    for (int k = 0; k < 5; ++k) {
      const std::size_t i = ui(rng), j = uj(rng);
      const double y = g.y(j);
      CHECK(low.x(i, j) == doctest::Approx(v0 * y * y * 2.0 * y).epsilon(1e-13));
      CHECK(raw.x(i, j) == doctest::Approx(v0 * y * y * y * y * 2.0 * y).epsilon(1e-13));
      CHECK(low.y(i, j) == 0.0);
    }
  }
}

TEST_CASE("stepper laplacian agrees with the covariant laplacian") {
  auto jets = [](double x, double y) {
    // A^x = x^2 y^3 + y, A^y = x^3 - x y^2
    return std::pair{
        oracle::Jet{x * x * y * y * y + y, 2 * x * y * y * y, 3 * x * x * y * y + 1, 2 * y * y * y, 6 * x * x * y},
        oracle::Jet{x * x * x - x * y * y, 3 * x * x - y * y, -2 * x * y, 6 * x, -2 * x}};
  };
  auto interior_error = [&](std::size_t n) {
    const Grid g(0.0, 1.0, 0.5, 1.5, n, n);
    const auto a = VectorPotentialField::sample(g, [&](const HalfPlanePoint& p) {
      const auto [jx, jy] = jets(p.x(), p.y());
      return std::pair{jx.v, jy.v};
    });
    const ComponentPair s = stepper_laplacian(a);
    const ScalarField cx = covariant_laplacian(a, 0);
    double err = 0.0, gap = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
      for (std::size_t j = 2; j + 2 < n; ++j) {
        const auto [jx, jy] = jets(g.x(i), g.y(j));
        err = std::max(err, std::abs(s.x(i, j) - oracle::laplacian_x(jx, jy, g.y(j))));
        err = std::max(err, std::abs(s.y(i, j) - oracle::laplacian_y(jx, jy, g.y(j))));
        gap = std::max(gap, std::abs(s.x(i, j) - cx(i, j)));
      }
    }
    return std::pair{err, gap};
  };
  const auto [e1, g1] = interior_error(17);
  const auto [e2, g2] = interior_error(33);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(g2 < g1);
  CHECK(g2 < 0.05);

  SUBCASE("y^2 is an eigenmode of A^y") {
    const Grid g(0.0, 1.0, 0.5, 1.5, 9, 9);
    const auto a = VectorPotentialField::sample(
        g, [](const HalfPlanePoint& p) { return std::pair{0.0, p.y() * p.y()}; });
    const ComponentPair s = stepper_laplacian(a);
    for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
      for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
        CHECK(s.y(i, j) == doctest::Approx(-g.y(j) * g.y(j)).epsilon(1e-12));
        CHECK(std::abs(s.x(i, j)) < 1e-12);
      }
    }
  }
}

TEST_CASE("stability bound") {
  const Grid g(0.0, 1.0, 1.0, 2.0, 21, 21);  // h = 0.05
  SolverConfig cfg{.grid = g, .eta = 0.1};
  CHECK(stability_bound(cfg) == doctest::Approx(0.0015625).epsilon(1e-12));
  cfg.eta = 0.2;
  CHECK(stability_bound(cfg) == doctest::Approx(0.0015625 / 2).epsilon(1e-12));
  cfg.eta = 0.0;
  CHECK(std::isinf(stability_bound(cfg)));

  SUBCASE("advective limit uses the applied coordinate speed") {
    cfg.eta = 0.0;
    cfg.time_scheme = TimeScheme::ssp_rk3;
    cfg.flow = FlowField::vertical_profile(1.0);
    CHECK(stability_bound(cfg) == doctest::Approx(0.05 / 4.0));
    cfg.flow_index = FlowIndex::raw;
    CHECK(stability_bound(cfg) == doctest::Approx(0.05 / 16.0));
  }
  SUBCASE("forward Euler with flow and no diffusion has no stable step") {
    cfg.flow = FlowField::vertical_profile(1.0);
    CHECK(stability_bound(cfg) == 0.0);
  }
}

TEST_CASE("step") {
  const Grid g(0.0, 1.0, 1.0, 2.0, 10, 10);
  SUBCASE("no diffusion and no flow leaves the state unchanged") {
    const SolverConfig cfg{.grid = g, .dt = 0.01, .boundary = BoundaryPolicy::periodic_x_dirichlet_y};
    const auto a = windowed(g);
    const auto b = step(a, cfg, 0.0);
    CHECK(same_values(a.ax(), b.ax()));
    CHECK(same_values(a.ay(), b.ay()));
  }
  SUBCASE("zero stays zero") {
    SolverConfig cfg = decay_config(g);
    cfg.flow = FlowField::vertical_profile(1.0);
    const RunResult r = run(cfg, VectorPotentialField::zeros(g));
    CHECK(r.final_state->ax().max_abs() == 0.0);
    CHECK(r.final_state->ay().max_abs() == 0.0);
  }
  SUBCASE("state on another grid is rejected") {
    const SolverConfig cfg{.grid = g, .dt = 0.01};
    CHECK_THROWS_AS(step(VectorPotentialField::zeros(Grid(0, 1, 1, 2, 8, 8)), cfg, 0.0), ConfigError);
  }
}

TEST_CASE("run bookkeeping and validation") {
  const Grid g(0.0, 1.0, 1.0, 2.0, 10, 10);
  SolverConfig cfg = decay_config(g);
  cfg.t_end = cfg.dt;
  const RunResult r = run(cfg, windowed(g));
  REQUIRE(r.times.size() == 2);
  CHECK(r.times[0] == 0.0);
  CHECK(r.times[1] == cfg.dt);
  CHECK(r.energy.size() == 2);
  CHECK(r.divergence_max.size() == 2);
  CHECK(r.steps == 1);

  SUBCASE("the last step lands on t_end") {
    cfg.t_end = 2.5 * cfg.dt;
    cfg.snapshot_every = 2;
    const RunResult s = run(cfg, windowed(g));
    CHECK(s.steps == 3);
    CHECK(s.times.back() == cfg.t_end);
    CHECK(s.times.size() == 3);  // t = 0, step 2, step 3
  }
  SUBCASE("rejections") {
    SolverConfig bad = cfg;
    bad.dt = 1.01 * stability_bound(cfg);
    bad.t_end = 10 * bad.dt;
    CHECK_THROWS_AS(run(bad, windowed(g)), ConfigError);
    bad = cfg;
    bad.t_end = 0.5 * cfg.dt;
    CHECK_THROWS_AS(run(bad, windowed(g)), ConfigError);
    bad = cfg;
    bad.eta = -0.1;
    CHECK_THROWS_AS(run(bad, windowed(g)), ConfigError);
    bad = cfg;
    bad.boundary = BoundaryPolicy::dirichlet_analytic;
    CHECK_THROWS_AS(run(bad, windowed(g)), ConfigError);
  }
}

TEST_CASE("diffusion decays and the reversed sign grows") {
  const Grid g(0.0, 1.0, 1.0, 2.0, 16, 16);
  SolverConfig cfg = decay_config(g);
  const RunResult d = run(cfg, windowed(g));
  for (std::size_t k = 1; k < d.field_l1_norms.size(); ++k) {
    CHECK(d.field_l1_norms[k] <= d.field_l1_norms[k - 1]);
  }
  CHECK(d.field_l1_norms.back() < 0.99 * d.field_l1_norms.front());

  cfg.diffusion_sign = DiffusionSign::as_written;
  cfg.t_end = 20 * cfg.dt;
  const RunResult u = run(cfg, windowed(g));
  for (std::size_t k = 1; k < u.field_l1_norms.size(); ++k) {
    CHECK(u.field_l1_norms[k] >= u.field_l1_norms[k - 1]);
  }
}

TEST_CASE("instability is reported with its step") {
  const Grid g(0.0, 1.0, 1.0, 2.0, 8, 8);
  SolverConfig cfg = decay_config(g);
  cfg.diffusion_sign = DiffusionSign::as_written;
  cfg.dt = stability_bound(cfg);
  cfg.t_end = 5000 * cfg.dt;
  cfg.snapshot_every = 100;
  try {
    run(cfg, windowed(g));
    FAIL("expected an instability");
  } catch (const InstabilityError& e) {
    CHECK(e.step() > 0);
    CHECK(e.step() < 5000);
    CHECK(e.time() > 0.0);
  }
}

TEST_CASE("linearity") {
  const Grid g(0.0, 1.0, 1.0, 2.0, 14, 14);
  SolverConfig cfg = decay_config(g);
  cfg.flow = FlowField::vertical_profile(0.5);
  cfg.dt = 0.9 * stability_bound(cfg);
  const RunResult a = run(cfg, windowed(g));
  const RunResult b = run(cfg, windowed(g, 3.0));
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    CHECK(b.field_l1_norms[k] == doctest::Approx(3.0 * a.field_l1_norms[k]).epsilon(1e-13));
    CHECK(b.energy[k] == doctest::Approx(9.0 * a.energy[k]).epsilon(1e-13));
  }
}

TEST_CASE("results do not depend on the thread count") {
  const Grid g(0.0, 2.0, 0.25, 4.0, 24, 40);
  const ForceFreeParams p{1.0, 1.0, 1.0, 0.1, 2.0};
  const auto init = VectorPotentialField::sample(
      g, [&](const HalfPlanePoint& q) { return force_free_potential(q, 0.0, p); });
  for (auto scheme : {TimeScheme::forward_euler, TimeScheme::ssp_rk3}) {
    SolverConfig cfg{.grid = g,
                     .eta = p.eta,
                     .flow = FlowField::vertical_profile(p.v0),
                     .boundary_family = [p](const HalfPlanePoint& q,
                                            double t) { return force_free_potential(q, t, p); },
                     .time_scheme = scheme};
    cfg.dt = 0.9 * stability_bound(cfg);
    cfg.t_end = 30 * cfg.dt;
    const RunResult one = run(cfg, init);
    cfg.threads = 3;
    const RunResult three = run(cfg, init);
    CHECK(one.field_l1_norms == three.field_l1_norms);
    CHECK(one.energy == three.energy);
    CHECK(one.divergence_max == three.divergence_max);
    CHECK(same_values(one.final_state->ax(), three.final_state->ax()));
    CHECK(same_values(one.final_state->ay(), three.final_state->ay()));
  }
}

TEST_CASE("forward Euler is first order in time") {
  const Grid g(0.0, 1.0, 1.0, 2.0, 12, 12);
  SolverConfig cfg = decay_config(g);
  const double dt0 = 0.8 * stability_bound(cfg);
  cfg.t_end = 40 * dt0;
  auto final_norm = [&](double dt) {
    cfg.dt = dt;
    return run(cfg, windowed(g)).field_l1_norms.back();
  };
  const double n1 = final_norm(dt0), n2 = final_norm(dt0 / 2), n4 = final_norm(dt0 / 4);
  CHECK((n1 - n2) / (n2 - n4) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("periodic boundary keeps x-independent data x-independent") {
  const Grid g(0.0, 1.0, 1.0, 2.0, 8, 12);
  const auto a = VectorPotentialField::sample(g, [](const HalfPlanePoint& p) {
    return std::pair{std::sin(3.0 * p.y()), p.y() * p.y()};
  });
  SolverConfig cfg{.grid = g, .eta = 0.1, .boundary = BoundaryPolicy::periodic_x_dirichlet_y};
  cfg.dt = 0.9 * stability_bound(cfg);
  cfg.t_end = 25 * cfg.dt;
  const RunResult r = run(cfg, a);
  const auto& s = *r.final_state;
  double spread = 0.0;
  for (std::size_t i = 1; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      spread = std::max(spread, std::abs(s.ax()(i, j) - s.ax()(0, j)));
      spread = std::max(spread, std::abs(s.ay()(i, j) - s.ay()(0, j)));
    }
  }
  CHECK(spread == 0.0);
  // A^y = y^2 decays as exp(-eta t) in the interior (eigenvalue -1), A^x moves.
  CHECK(s.ax()(3, 5) != a.ax()(3, 5));
}
