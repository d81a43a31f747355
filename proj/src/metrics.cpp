#include "dsm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsm/kernels.hpp"

namespace dsm {

double pv_utilization(const std::vector<Customer>& customers,
                      const std::vector<Schedule>& schedules) {
  if (customers.size() != schedules.size())
    throw std::invalid_argument("pv_utilization: customers and schedules "
                                "differ in length");
  double consumed = 0.0;
  double generated = 0.0;
  for (std::size_t c = 0; c < customers.size(); ++c) {
    const Customer& cust = customers[c];
    if (!cust.has_pv || !cust.pv.has_value()) continue;
    const int T = static_cast<int>(cust.pv->generation_kw.size());
    std::vector<double> gross = gross_profile(schedules[c], cust);
    gross.resize(static_cast<std::size_t>(T), 0.0);  // empty appliance list
    for (int t = 1; t <= T; ++t) {
      double pv = cust.pv_at(t);
      generated += pv;
      consumed += std::min(gross[static_cast<std::size_t>(t - 1)], pv);
    }
  }
  if (generated <= 0.0)
    throw UndefinedMetricError(
        "pv_utilization undefined: total PV generation is zero");
  return 100.0 * consumed / generated;
}

VoltageStats voltage_deviation(const std::vector<LoadFlowSolution>& day,
                               const TimeGrid& grid) {
  VoltageStats stats;
  stats.max_voltage_pu = -1.0;
  stats.min_voltage_pu = std::numeric_limits<double>::max();
  double dev = 0.0;
  for (std::size_t s = 0; s < day.size(); ++s) {
    const LoadFlowSolution& sol = day[s];
    if (!sol.converged)
      throw UndefinedMetricError("voltage_deviation: slot " +
                                 std::to_string(s + 1) + " did not converge");
    dev += kernels::abs_deviation_sum(sol.bus_voltage_pu.data(), 1.0,
                                      sol.bus_voltage_pu.size());
    for (std::size_t b = 0; b < sol.bus_voltage_pu.size(); ++b) {
      double v = sol.bus_voltage_pu[b];
      if (v > stats.max_voltage_pu) {
        stats.max_voltage_pu = v;
        stats.max_bus_index = static_cast<int>(b);
        stats.max_slot = static_cast<int>(s) + 1;
      }
      if (v < stats.min_voltage_pu) {
        stats.min_voltage_pu = v;
        stats.min_bus_index = static_cast<int>(b);
        stats.min_slot = static_cast<int>(s) + 1;
      }
    }
  }
  stats.sum_abs_deviation = dev * grid.slot_hours;
  if (day.empty()) {
    stats.max_voltage_pu = 1.0;
    stats.min_voltage_pu = 1.0;
  }
  return stats;
}

namespace {

SavingsEntry make_entry(double baseline, double optimized) {
  SavingsEntry e;
  e.baseline_cents = baseline;
  e.optimized_cents = optimized;
  if (baseline > 0.0)
    e.reduction_pct = 100.0 * (baseline - optimized) / baseline;
  return e;
}

}  // namespace

CostSavings cost_savings(const std::vector<Customer>& customers,
                         const std::vector<CostBreakdown>& baseline,
                         const std::vector<CostBreakdown>& optimized) {
  if (customers.size() != baseline.size() ||
      customers.size() != optimized.size())
    throw std::invalid_argument("cost_savings: input lengths differ");
  CostSavings out;
  std::map<std::string, std::pair<double, double>> area_totals;
  double base_sum = 0.0, opt_sum = 0.0;
  for (std::size_t c = 0; c < customers.size(); ++c) {
    double b = baseline[c].total_cents;
    double o = optimized[c].total_cents;
    out.per_customer[customers[c].id] = make_entry(b, o);
    auto& area = area_totals[to_string(customers[c].kind)];
    area.first += b;
    area.second += o;
    base_sum += b;
    opt_sum += o;
  }
  for (const auto& [name, totals] : area_totals)
    out.per_area[name] = make_entry(totals.first, totals.second);
  out.overall = make_entry(base_sum, opt_sum);
  return out;
}

double loss_comparison(const std::vector<LoadFlowSolution>& run_a,
                       const std::vector<LoadFlowSolution>& run_b,
                       const TimeGrid& grid) {
  if (run_a.size() != run_b.size())
    throw std::invalid_argument("loss_comparison: slot counts differ");
  double loss_a = daily_loss_kwh(run_a, grid);
  double loss_b = daily_loss_kwh(run_b, grid);
  if (loss_a <= 0.0)
    throw UndefinedMetricError(
        "loss_comparison undefined: reference run has zero loss");
  return 100.0 * (loss_a - loss_b) / loss_a;
}

MetricsSummary summarize(const std::vector<Customer>& customers,
                         const std::vector<Schedule>& optimized_schedules,
                         const std::vector<CostBreakdown>& baseline_costs,
                         const std::vector<CostBreakdown>& optimized_costs,
                         const std::vector<LoadFlowSolution>& baseline_day,
                         const std::vector<LoadFlowSolution>& optimized_day,
                         const TimeGrid& grid) {
  MetricsSummary s;

  auto area_customers = [&](CustomerKind kind) {
    std::vector<Customer> cs;
    std::vector<Schedule> sc;
    for (std::size_t c = 0; c < customers.size(); ++c) {
      if (customers[c].kind != kind) continue;
      cs.push_back(customers[c]);
      sc.push_back(optimized_schedules[c]);
    }
    return std::make_pair(cs, sc);
  };
  auto try_util = [&](const std::vector<Customer>& cs,
                      const std::vector<Schedule>& sc)
      -> std::optional<double> {
    try {
      return pv_utilization(cs, sc);
    } catch (const UndefinedMetricError&) {
      return std::nullopt;
    }
  };

  auto [res_c, res_s] = area_customers(CustomerKind::Residential);
  auto [com_c, com_s] = area_customers(CustomerKind::Commercial);
  s.pv_utilization_residential_pct = try_util(res_c, res_s);
  s.pv_utilization_commercial_pct = try_util(com_c, com_s);
  s.pv_utilization_overall_pct = try_util(customers, optimized_schedules);

  s.savings = cost_savings(customers, baseline_costs, optimized_costs);
  s.daily_loss_kwh_baseline = daily_loss_kwh(baseline_day, grid);
  s.daily_loss_kwh_optimized = daily_loss_kwh(optimized_day, grid);
  if (s.daily_loss_kwh_baseline > 0.0)
    s.loss_reduction_pct = 100.0 *
                           (s.daily_loss_kwh_baseline -
                            s.daily_loss_kwh_optimized) /
                           s.daily_loss_kwh_baseline;
  s.voltage_baseline = voltage_deviation(baseline_day, grid);
  s.voltage_optimized = voltage_deviation(optimized_day, grid);
  return s;
}

}  // namespace dsm
