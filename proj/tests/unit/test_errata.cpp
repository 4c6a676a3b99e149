#include <cmath>
#include <map>
#include <stdexcept>

#include "doctest.h"
#include "hyperdyn/errata.hpp"

using namespace hyperdyn;
using doctest::Approx;

namespace {

const std::vector<ErrataEntry>& ledger() {
  static const std::vector<ErrataEntry> entries = run_errata();
  return entries;
}

const ErrataEntry& entry(const std::string& id) {
  for (const auto& e : ledger()) {
    if (e.id == id) return e;
  }
  throw std::runtime_error("missing errata entry " + id);
}

double measured(const ErrataEntry& e, const std::string& key) {
  for (const auto& [k, v] : e.measurements) {
    if (k == key) return v;
  }
  throw std::runtime_error("missing measurement " + key);
}

}  // namespace

TEST_CASE("every entry is present, in order, with both readings evaluated") {
  const auto ids = errata_ids();
  REQUIRE(ledger().size() == ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const ErrataEntry& e = ledger()[k];
    CHECK(e.id == ids[k]);
    CHECK_FALSE(e.location.empty());
    CHECK_FALSE(e.finding.empty());
    CHECK(e.first.name != e.second.name);
    CHECK(std::isfinite(e.first.value));
    CHECK(std::isfinite(e.second.value));
  }
}

TEST_CASE("diffusion sign") {
  const auto& e = entry("diffusion_sign");
  CHECK(e.first.value < 1.0);
  CHECK(e.second.value > 1.0);
  CHECK(measured(e, "standard_monotone_decay") == 1.0);
  CHECK(measured(e, "as_written_monotone_growth") == 1.0);
}

TEST_CASE("B_z prefactor") {
  const auto& e = entry("bz_prefactor");
  CHECK(measured(e, "ratio_over_y2_max_dev") < 1e-12);
  CHECK(measured(e, "printed_crossings") == 1.0);
  CHECK(measured(e, "dA_crossings") == 0.0);
  // Neither printed bracket is dA of the potential.
  CHECK(e.first.value > 0.1);
  CHECK(e.second.value > 0.1);
  CHECK(measured(e, "minus_dy_lowered_at_y1") == Approx(4.0 * std::exp(1.0)));
  CHECK(measured(e, "printed_at_y1") == Approx(-2.0 * std::exp(1.0)));
}

TEST_CASE("restoring force residual") {
  const auto& e = entry("restoring_force");
  CHECK(e.first.value == 2.0);
  CHECK(e.second.value == 2.0);
  CHECK(measured(e, "chain_rule_y2") == 10.0);
  CHECK(measured(e, "metric_length_y2") == 2.0);
  CHECK(measured(e, "chain_rule_y0.5") == 0.625);
}

TEST_CASE("small-y energy form") {
  const auto& e = entry("energy_small_y");
  CHECK(e.first.value < 0.0);
  CHECK(e.second.value > 0.0);
  CHECK(measured(e, "literal_sign_agrees") == 0.0);
  CHECK(measured(e, "energy_rate") == Approx(measured(e, "two_gamma")).epsilon(0.01));
  CHECK(measured(e, "literal_time_rate") == Approx(0.5 * measured(e, "two_gamma")));
}

TEST_CASE("flow index position") {
  const auto& e = entry("flow_index");
  CHECK(e.first.value > 0.0);
  CHECK(std::abs(e.first.value - e.second.value) > 0.05);
}

TEST_CASE("forced B_z") {
  const auto& e = entry("forced_bz");
  const double hy = (8.0 - 0.25) / 511.0;
  CHECK(std::abs(e.first.value - 1.0) <= hy);
  CHECK(std::abs(e.second.value - 4.0) <= hy);
  CHECK(measured(e, "printed_line") == 1.0);
  CHECK(measured(e, "dA_line") == 4.0);
  CHECK(measured(e, "index_factor_y2_max_dev") < 1e-12);
}

TEST_CASE("errata runs are deterministic") {
  const auto again = run_errata();
  REQUIRE(again.size() == ledger().size());
  for (std::size_t k = 0; k < again.size(); ++k) {
    CHECK(again[k].first.value == ledger()[k].first.value);
    CHECK(again[k].second.value == ledger()[k].second.value);
    CHECK(again[k].measurements == ledger()[k].measurements);
  }
}
