#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dsm/model.hpp"

// Cost evaluation and the per-customer DSM optimizer. The objective is
// electricity cost plus a shift penalty; the optimizer is block-coordinate
// descent with an exact placement subproblem per appliance, verified against
// the exhaustive oracle below.

namespace dsm {

struct CostBreakdown {
  double electricity_cents = 0.0;
  double penalty_cents = 0.0;
  double total_cents = 0.0;
  // appliance id -> total shift distance dT in slots
  std::map<std::string, int> per_appliance_shift_slots;
};

struct OptimizerConfig {
  int max_passes = 50;
  double improvement_epsilon = 1e-9;  // cents; stop when a pass gains less
};

// slot_hours * sum_t max(gross - pv, 0) * price, in cents.
double electricity_cost(const Schedule& schedule, const Customer& customer,
                        const TimeGrid& grid, const Tariff& tariff);

// Rank-paired shift distance sum_k |new[k] - baseline[k]| in slots.
int shift_duration(const Appliance& appliance,
                   const std::vector<int>& new_on_slots);

// slot_hours * sum_a penalty(criticality_a) * r_a * dT_a, in cents.
double penalty_cost(const Schedule& schedule, const Customer& customer,
                    const TimeGrid& grid, const PenaltySchedule& penalties);

CostBreakdown total_cost(const Schedule& schedule, const Customer& customer,
                         const TimeGrid& grid, const Tariff& tariff,
                         const PenaltySchedule& penalties);

struct OptimizeResult {
  Schedule schedule;
  CostBreakdown cost;
  int passes = 0;
  // objective after the baseline and after each pass; non-increasing
  std::vector<double> objective_trace;
};

// Block-coordinate descent from the baseline. Each pass visits flexible
// appliances in descending-rating order (ties by id) and solves that
// appliance's placement exactly against the others' frozen load: an
// enumeration over starts for uninterruptible appliances, a rank-indexed
// dynamic program for interruptible ones. Deterministic; never returns a
// schedule costing more than the baseline.
OptimizeResult optimize_customer(const Customer& customer,
                                 const TimeGrid& grid, const Tariff& tariff,
                                 const PenaltySchedule& penalties,
                                 const OptimizerConfig& config = {});

class SearchCapError : public std::runtime_error {
 public:
  explicit SearchCapError(const std::string& what)
      : std::runtime_error(what) {}
};

// Exhaustive enumeration of the joint placement space; ground truth for
// optimizer tests on desk-scale instances. Throws SearchCapError when the
// placement product exceeds search_cap.
OptimizeResult brute_force_optimal(const Customer& customer,
                                   const TimeGrid& grid, const Tariff& tariff,
                                   const PenaltySchedule& penalties,
                                   long long search_cap = 10'000'000);

// Number of feasible placements of one appliance within its window
// (starts for a contiguous block, D-subsets for interruptible, 1 for fixed).
long long placement_count(const Appliance& appliance);

}  // namespace dsm
