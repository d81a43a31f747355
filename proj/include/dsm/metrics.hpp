#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsm/model.hpp"
#include "dsm/powerflow.hpp"
#include "dsm/scheduler.hpp"

// Derived study metrics: PV self-consumption, voltage deviation and extrema,
// cost savings, and loss comparison between runs.

namespace dsm {

class UndefinedMetricError : public std::runtime_error {
 public:
  explicit UndefinedMetricError(const std::string& what)
      : std::runtime_error(what) {}
};

// Share of generated PV energy consumed on-site, in percent:
// 100 * sum min(gross, pv) / sum pv over the given customers and all slots.
// Throws UndefinedMetricError when total PV generation is zero.
double pv_utilization(const std::vector<Customer>& customers,
                      const std::vector<Schedule>& schedules);

struct VoltageStats {
  double sum_abs_deviation = 0.0;  // sum |V - 1| * slot_hours over buses/slots
  double max_voltage_pu = 1.0;
  double min_voltage_pu = 1.0;
  int max_bus_index = -1;
  int max_slot = 0;
  int min_bus_index = -1;
  int min_slot = 0;
};

// Requires every slot converged; throws UndefinedMetricError otherwise.
VoltageStats voltage_deviation(const std::vector<LoadFlowSolution>& day,
                               const TimeGrid& grid);

struct SavingsEntry {
  double baseline_cents = 0.0;
  double optimized_cents = 0.0;
  std::optional<double> reduction_pct;  // absent when baseline is zero
};

// Per-customer reductions plus cost-weighted area aggregates (sums of cents,
// not means of percentages).
struct CostSavings {
  std::map<std::string, SavingsEntry> per_customer;
  std::map<std::string, SavingsEntry> per_area;  // "residential"/"commercial"
  SavingsEntry overall;
};

CostSavings cost_savings(const std::vector<Customer>& customers,
                         const std::vector<CostBreakdown>& baseline,
                         const std::vector<CostBreakdown>& optimized);

// 100 * (loss_a - loss_b) / loss_a on daily energy losses; positive when run
// b loses less. Throws UndefinedMetricError when run a has zero loss.
double loss_comparison(const std::vector<LoadFlowSolution>& run_a,
                       const std::vector<LoadFlowSolution>& run_b,
                       const TimeGrid& grid);

struct MetricsSummary {
  std::optional<double> pv_utilization_residential_pct;
  std::optional<double> pv_utilization_commercial_pct;
  std::optional<double> pv_utilization_overall_pct;
  CostSavings savings;
  double daily_loss_kwh_baseline = 0.0;
  double daily_loss_kwh_optimized = 0.0;
  std::optional<double> loss_reduction_pct;  // optimized vs baseline run
  VoltageStats voltage_baseline;
  VoltageStats voltage_optimized;
};

MetricsSummary summarize(const std::vector<Customer>& customers,
                         const std::vector<Schedule>& optimized_schedules,
                         const std::vector<CostBreakdown>& baseline_costs,
                         const std::vector<CostBreakdown>& optimized_costs,
                         const std::vector<LoadFlowSolution>& baseline_day,
                         const std::vector<LoadFlowSolution>& optimized_day,
                         const TimeGrid& grid);

}  // namespace dsm
