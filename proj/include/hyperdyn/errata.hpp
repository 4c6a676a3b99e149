#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hyperdyn/analytic.hpp"
#include "hyperdyn/fields.hpp"

namespace hyperdyn {

// One way of reading an ambiguous or inconsistent formula, evaluated.
struct ErrataReading {
  std::string name;
  std::string expression;
  double value;
};

struct ErrataEntry {
  std::string id;
  std::string location;
  std::string finding;
  ErrataReading first;
  ErrataReading second;
  // Supporting numbers, in a fixed order.
  std::vector<std::pair<std::string, double>> measurements;
};

struct ErrataSettings {
  Grid grid{0.0, 2.0, 0.25, 4.0, 64, 128};
  ForceFreeParams force_free{1.0, 1.0, 1.0, 0.1, 2.0};
  ForcedParams forced{-1.0, -2.0, 0.0};
  unsigned threads = 1;
};

/// Ids of the entries run_errata produces, in order.
std::vector<std::string> errata_ids();

/// Runs every discrepancy experiment. Deterministic for fixed settings.
std::vector<ErrataEntry> run_errata(const ErrataSettings& settings = {});

}  // namespace hyperdyn
