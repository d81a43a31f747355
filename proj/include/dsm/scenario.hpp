#pragma once

#include <string>
#include <vector>

#include "dsm/model.hpp"
#include "dsm/powerflow.hpp"

// Scenario: one self-describing JSON document holding the time grid, the
// per-kind tariffs and penalty schedules, the feeder, the customers, and the
// run options. load_scenario validates everything up front and rejects
// rather than repairs.

namespace dsm {

struct ScenarioOptions {
  int participation_pct = 100;
  double pv_scale = 1.0;
  bool dsm_enabled = true;
  // commercial site runs DSM: "auto" (only at 100% participation),
  // "always", or "never"
  std::string commercial_dsm = "auto";
};

struct Scenario {
  std::string name;
  TimeGrid time_grid;
  Tariff residential_tariff;
  Tariff commercial_tariff;
  PenaltySchedule residential_penalty;
  PenaltySchedule commercial_penalty;
  double power_factor = 0.95;
  std::vector<Customer> customers;
  FeederNetwork network;
  ScenarioOptions options;
  std::string source_hash;  // FNV-1a of the file bytes, set by load_scenario

  const Tariff& tariff_for(CustomerKind kind) const {
    return kind == CustomerKind::Residential ? residential_tariff
                                             : commercial_tariff;
  }
  const PenaltySchedule& penalty_for(CustomerKind kind) const {
    return kind == CustomerKind::Residential ? residential_penalty
                                             : commercial_penalty;
  }

  // Cross-checks every invariant the loader enforces; useful after
  // programmatic edits (sweeps, CLI overrides).
  void validate() const;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text,
                        const std::string& origin = "<string>");
std::string scenario_to_json(const Scenario& scenario);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace dsm
