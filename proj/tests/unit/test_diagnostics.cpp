#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hyperdyn/diagnostics.hpp"
#include "hyperdyn/errors.hpp"

using namespace hyperdyn;
using doctest::Approx;

namespace {

std::vector<double> grid_times(double t_end, double step) {
  std::vector<double> t;
  for (int k = 0; k * step <= t_end + 1e-12; ++k) t.push_back(k * step);
  return t;
}

MagneticTwoForm sampled(const Grid& g, const std::function<double(const HalfPlanePoint&)>& f) {
  return MagneticTwoForm(ScalarField::sample(g, f));
}

}  // namespace

TEST_CASE("fit_growth_rate") {
  const auto t = grid_times(1.0, 0.1);
  std::vector<double> n;
  for (double s : t) n.push_back(std::exp(2.0 * s));
  const GrowthFit fit = fit_growth_rate(t, n);
  CHECK(std::abs(fit.gamma_est - 2.0) <= 1e-10);
  CHECK(fit.fit_window.first == Approx(0.5));
  CHECK(fit.fit_window.second == Approx(1.0));
  CHECK(fit.points == 6);

  const std::vector<double> flat(t.size(), 3.5);
  CHECK(fit_growth_rate(t, flat).gamma_est == 0.0);

  SUBCASE("exact on pure exponentials for any window") {
    std::vector<double> m;
    for (double s : t) m.push_back(0.7 * std::exp(-1.3 * s));
    for (double w : {0.3, 0.5, 0.8, 1.0}) {
      const GrowthFit f = fit_growth_rate(t, m, w);
      CHECK(f.residual_rms < 1e-12);
      CHECK(f.gamma_est == Approx(-1.3).epsilon(1e-12));
      CHECK(f.intercept == Approx(std::log(0.7)).epsilon(1e-12));
    }
  }
  SUBCASE("degenerate inputs") {
    CHECK_THROWS_AS(fit_growth_rate(std::vector<double>{0, 1}, std::vector<double>{1, 2}), DegenerateError);
    std::vector<double> bad = n;
    bad.back() = 0.0;
    CHECK_THROWS_AS(fit_growth_rate(t, bad), DegenerateError);
    bad.back() = -1.0;
    CHECK_THROWS_AS(fit_growth_rate(t, bad), DegenerateError);
    CHECK_THROWS_AS(fit_growth_rate(t, n, 0.0), DegenerateError);
    // a negative norm before the window is ignored
    bad = n;
    bad.front() = -1.0;
    CHECK_NOTHROW(fit_growth_rate(t, bad));
  }
}

TEST_CASE("magnetic_energy") {
  CHECK(magnetic_energy(MagneticTwoForm(ScalarField::zeros(Grid(0, 1, 1, 2, 8, 8)))) == 0.0);

  auto unit_energy_error = [](std::size_t n) {
    const Grid g(0, 1, 1, 2, n, n);
    const auto one = sampled(g, [](const HalfPlanePoint&) { return 1.0; });
    return std::abs(magnetic_energy(one) - 0.5);
  };
  const double e1 = unit_energy_error(11), e2 = unit_energy_error(21), e3 = unit_energy_error(41);
  CHECK(e1 / e2 == Approx(4.0).epsilon(0.1));
  CHECK(e2 / e3 == Approx(4.0).epsilon(0.1));
  CHECK(e3 < 1e-4);

  const Grid g(0, 1, 1, 2, 9, 13);
  const auto b = sampled(g, [](const HalfPlanePoint& p) { return p.x() - p.y(); });
  const auto b3 = sampled(g, [](const HalfPlanePoint& p) { return 3.0 * (p.x() - p.y()); });
  CHECK(magnetic_energy(b3) == Approx(9.0 * magnetic_energy(b)).epsilon(1e-14));
  CHECK(field_l1_norm(b3) == Approx(3.0 * field_l1_norm(b)).epsilon(1e-14));
}

TEST_CASE("reversal_scan") {
  const Grid g(0, 2, 0.25, 4, 128, 256);

  SUBCASE("force-free field crosses once at y = 1/2") {
    const ForceFreeParams p{1, 1, 1, 0.1, 2};
    const auto b = sampled(g, [&](const HalfPlanePoint& q) { return force_free_bz(q, 0.0, p); });
    const auto c = reversal_scan(b, 1.0);
    REQUIRE(c.size() == 1);
    CHECK(std::abs(c[0].y - 0.5) <= g.hy());
    CHECK(std::abs(c[0].y - 0.5) <= g.hy() / 100);
    CHECK(c[0].sign_change == -1);  // positive below the line, negative above
  }
  SUBCASE("forced field crosses at v0 / (2 gamma)") {
    const ForcedParams p{-1.0, -2.0, 0.0};
    const auto b = sampled(g, [&](const HalfPlanePoint& q) { return forced_bz(q, 0.0, p); });
    const auto c = reversal_scan(b, 1.0);
    REQUIRE(c.size() == 1);
    CHECK(std::abs(c[0].y - 1.0) <= g.hy());
  }
  SUBCASE("a uniform field has no crossing") {
    CHECK(reversal_scan(MagneticTwoForm::uniform_reference(g), 0.7).empty());
  }
  SUBCASE("a slice off the grid is rejected") {
    CHECK_THROWS_AS(reversal_scan(MagneticTwoForm::uniform_reference(g), 2.5), DomainError);
  }
  SUBCASE("exactly one crossing for random force-free parameters") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ua(-3.0, 3.0), uk(0.0, 3.0);
    for (int draw = 0; draw < 50; ++draw) {
      double a0 = ua(rng);
      if (std::abs(a0) < 1e-3) a0 = 1.0;
      const ForceFreeParams p{a0, uk(rng), 1.0, 0.1, 2.0};
      const auto b = sampled(g, [&](const HalfPlanePoint& q) { return force_free_bz(q, 0.0, p); });
      const auto c = reversal_scan(b, 0.5);
      REQUIRE(c.size() == 1);
      CHECK(std::abs(c[0].y - 0.5) <= g.hy());
    }
  }
}

TEST_CASE("entropy_bound_check") {
  const auto c = entropy_bound_check({1, 1, 1, 0.1, 2}, 1.9);
  CHECK(c.v0_threshold == Approx(0.1));
  CHECK(c.gamma_formula == Approx(1.9));
  CHECK(c.htop_lower_bound == Approx(1.9));
  CHECK(c.fast_dynamo);
  CHECK(c.v0_above_threshold);
  CHECK(c.rate_matches);
  CHECK(c.consistent());

  const auto slow = entropy_bound_check({1, 1, 1, 0.1, 0.05}, -0.05);
  CHECK(slow.v0_threshold == Approx(0.1));
  CHECK(slow.gamma_formula == Approx(-0.05));
  CHECK(slow.htop_lower_bound == 0.0);
  CHECK_FALSE(slow.fast_dynamo);
  CHECK_FALSE(slow.v0_above_threshold);
  CHECK(slow.consistent());

  const auto ideal = entropy_bound_check({1, 2, 1, 0.0, 0.3}, 0.6);
  CHECK(ideal.v0_threshold == 0.0);
  CHECK(ideal.gamma_formula == Approx(0.6));
  CHECK(ideal.fast_dynamo);

  CHECK_FALSE(entropy_bound_check({1, 1, 1, 0.1, 2}, 1.5).rate_matches);
  CHECK_THROWS_AS(entropy_bound_check({1, 0, 1, 0.1, 2}, 0.0), DegenerateError);
  CHECK_THROWS_AS(entropy_bound_check({1, -1, 1, 0.1, 2}, 0.0), DegenerateError);
}

TEST_CASE("integrate_deviation") {
  const auto s = integrate_deviation(0.0, 1.0, 1.0, 1000);
  REQUIRE(s.size() == 1001);
  CHECK(std::abs(s.back().j - 1.175201194) <= 1e-9);
  CHECK(std::abs(s.back().j - std::sinh(1.0)) <= 1e-10);
  CHECK(std::abs(integrate_deviation(1.0, 0.0, 1.0, 1000).back().j - 1.543080635) <= 1e-9);
  for (const auto& smp : integrate_deviation(0.0, 0.0, 3.0, 50)) CHECK(smp.j == 0.0);

  auto err = [](std::size_t n) {
    double e = 0.0;
    for (const auto& smp : integrate_deviation(0.0, 1.0, 5.0, n)) {
      e = std::max(e, std::abs(smp.j - std::sinh(smp.s)));
    }
    return e;
  };
  CHECK(err(100) / err(200) == Approx(16.0).epsilon(0.2));

  CHECK_THROWS_AS(integrate_deviation(0, 1, 1.0, 9), DegenerateError);
  CHECK_THROWS_AS(integrate_deviation(0, 1, 0.0, 100), DegenerateError);
  CHECK_THROWS_AS(integrate_deviation(0, 1, -1.0, 100), DegenerateError);
}

TEST_CASE("energy_growth_report") {
  const Grid g(0, 2, 0.25, 4, 32, 64);
  const auto t = grid_times(0.5, 0.05);

  const ForceFreeParams p{1, 1, 1, 0.1, 2};
  const auto rep = energy_growth_report(closed_form_series(g, p, t), p);
  CHECK_FALSE(rep.fit_skipped);
  CHECK(rep.expected_rate == Approx(3.8));
  CHECK(rep.rate_rel_error < 0.01);
  CHECK(rep.literal_value < 0.0);
  CHECK(rep.subdomain_energy > 0.0);
  CHECK_FALSE(rep.literal_sign_agrees);
  CHECK(rep.evaluated_at_time == Approx(0.5));

  const ForceFreeParams still{1, 1, 1, 0.1, 0.1};  // gamma = 0
  const auto flat = energy_growth_report(closed_form_series(g, still, t), still);
  CHECK(std::abs(flat.energy_rate) <= 1e-8);

  const ForceFreeParams none{0, 1, 1, 0.1, 2};
  const auto zero = energy_growth_report(closed_form_series(g, none, t), none);
  CHECK(zero.fit_skipped);
  CHECK_FALSE(zero.note.empty());
}
