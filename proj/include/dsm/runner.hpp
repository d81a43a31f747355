#pragma once

#include <string>
#include <vector>

#include "dsm/metrics.hpp"
#include "dsm/scenario.hpp"

// Experiment orchestration: optimize participants, solve the feeder for the
// baseline and optimized days, aggregate metrics, and persist results.
// Everything is deterministic: scenario bytes plus options fix every output
// byte.

namespace dsm {

struct CustomerOutcome {
  bool participated = false;
  Schedule baseline_schedule;
  Schedule optimized_schedule;
  CostBreakdown baseline_cost;
  CostBreakdown optimized_cost;
};

struct ScenarioResult {
  std::string scenario_name;
  std::string scenario_hash;
  ScenarioOptions options;
  // customers as materialized for this run (pv_scale applied), aligned with
  // outcomes
  std::vector<Customer> customers;
  std::vector<CustomerOutcome> outcomes;
  std::vector<LoadFlowSolution> baseline_day;
  std::vector<LoadFlowSolution> optimized_day;
  MetricsSummary metrics;
  TimeGrid time_grid;
  std::vector<int> bus_ids;
};

// Indices of customers that run DSM: the first ceil(pct/100 * N) residential
// customers in ascending id order; commercial sites per the commercial_dsm
// rule ("auto" admits them only at pct = 100).
std::vector<std::size_t> select_participants(
    const std::vector<Customer>& customers, int participation_pct,
    const std::string& commercial_dsm = "auto");

ScenarioResult run_scenario(const Scenario& scenario);

// One full run per value along the axis; axis is one of
// "penalty_residential", "participation_pct", "pv_scale".
std::vector<ScenarioResult> sweep(const Scenario& scenario,
                                  const std::string& axis,
                                  const std::vector<double>& values);

// Writes summary.json, costs.csv, voltages.csv, losses.csv, schedules.csv.
void write_results(const ScenarioResult& result, const std::string& out_dir);

// Per-value subdirectories plus a combined sweep.csv comparison table.
void write_sweep(const std::vector<ScenarioResult>& results,
                 const std::string& axis, const std::vector<double>& values,
                 const std::string& out_dir);

// Applies a CLI/sweep override to a copy of the scenario.
Scenario with_residential_penalty(Scenario scenario, double cents_per_kwh);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dsm
