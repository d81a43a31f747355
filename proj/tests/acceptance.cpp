// Acceptance suite for the reference artifact. Each criterion prints one
// PASS/FAIL line; the process exits nonzero if any criterion fails.
//
// Paper-scale magnitudes are not point-reproducible (the source appliance
// inventory, tariff curves, and feeder impedances are not published), so the
// suite combines oracle equivalence, hand-computed fixtures, and direction
// tests on the synthesized reference scenario.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dsm/runner.hpp"
#include "dsm/scheduler.hpp"
#include "instance_gen.hpp"

using namespace dsm;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok,
            const std::string& detail) {
  std::printf("%s  criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number,
              name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void run_criterion(int number, const std::string& name,
                   const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
    ok = false;
  }
  report(number, name, ok, detail);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

// PV-peak window of the reference scenario: 12:00-14:00, slots 25..28
constexpr int kPvPeakFirstSlot = 25;
constexpr int kPvPeakLastSlot = 28;

// highest voltage on the commercial side of the feeder (bus ids >= 17)
// during PV-peak slots
double commercial_side_peak_voltage(const ScenarioResult& r) {
  double peak = -1.0;
  for (int t = kPvPeakFirstSlot; t <= kPvPeakLastSlot; ++t) {
    const LoadFlowSolution& sol =
        r.optimized_day[static_cast<std::size_t>(t - 1)];
    for (std::size_t b = 0; b < r.bus_ids.size(); ++b)
      if (r.bus_ids[b] >= 17) peak = std::max(peak, sol.bus_voltage_pu[b]);
  }
  return peak;
}

bool criterion_oracle_equivalence(std::string& detail) {
  const auto started = std::chrono::steady_clock::now();
  std::mt19937 rng(20250808);

  int non_interacting = 0, interacting = 0;
  double gap_sum = 0.0, gap_max = 0.0;
  for (int i = 0; i < 120; ++i) {
    const bool interact = i % 2 == 1;
    testgen::Instance inst = testgen::make_oracle_instance(rng, interact);
    OptimizeResult cd = optimize_customer(inst.customer, inst.grid,
                                          inst.tariff, inst.penalties);
    OptimizeResult bf = brute_force_optimal(inst.customer, inst.grid,
                                            inst.tariff, inst.penalties);
    if (!check_feasibility(cd.schedule, inst.customer).empty()) {
      detail = "infeasible optimizer output at seed case " +
               std::to_string(i);
      return false;
    }
    if (cd.cost.total_cents > cd.objective_trace.front() + 1e-9) {
      detail = "optimizer worsened the baseline at seed case " +
               std::to_string(i);
      return false;
    }
    if (!interact) {
      ++non_interacting;
      double scale = std::max(1.0, std::fabs(bf.cost.total_cents));
      if (std::fabs(cd.cost.total_cents - bf.cost.total_cents) >
          1e-9 * scale) {
        detail = "non-interacting mismatch at seed case " +
                 std::to_string(i) + ": cd=" + fmt(cd.cost.total_cents) +
                 " bf=" + fmt(bf.cost.total_cents);
        return false;
      }
    } else {
      ++interacting;
      double gap = (cd.cost.total_cents - bf.cost.total_cents) /
                   std::max(bf.cost.total_cents, 1.0);
      if (gap < 0.0) gap = 0.0;  // descent can only tie or trail the oracle
      gap_sum += gap;
      gap_max = std::max(gap_max, gap);
    }
  }
  const double mean_gap = interacting > 0 ? gap_sum / interacting : 0.0;
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    started)
          .count();
  detail = std::to_string(non_interacting) + " exact + " +
           std::to_string(interacting) +
           " interacting cases; mean gap " + fmt(100.0 * mean_gap) +
           "%, max gap " + fmt(100.0 * gap_max) + "%, " + fmt(elapsed) + " s";
  return mean_gap <= 0.05 && elapsed < 60.0;
}

bool criterion_hand_fixtures(std::string& detail) {
  const TimeGrid grid{48, 0.5};

  // electricity cost: 2 kW on two half-hour slots at 10 cents/kWh = 20 cents
  Customer c;
  c.id = "fx";
  c.kind = CustomerKind::Residential;
  c.bus = 1;
  c.max_demand_kw = 10.0;
  Appliance a;
  a.id = "a";
  a.rating_kw = 2.0;
  a.duration_slots = 2;
  a.window_start = 1;
  a.window_end = 48;
  a.flexibility = Flexibility::ShiftableUninterruptible;
  a.criticality = Criticality::High;
  a.baseline_on_slots = {1, 2};
  c.appliances = {a};
  Schedule base = Schedule::baseline_of(c, grid);
  Tariff flat{std::vector<double>(48, 10.0)};
  if (electricity_cost(base, c, grid, flat) != 20.0) {
    detail = "electricity fixture != 20 cents";
    return false;
  }

  // penalty: r=2 kW shifted 4 slots at 3 cents/kWh = 12 cents
  Schedule shifted = base;
  shifted.on[0][0] = shifted.on[0][1] = 0;
  shifted.on[0][4] = shifted.on[0][5] = 1;  // {1,2} -> {5,6}: dT = 8
  // use a one-slot appliance to express dT = 4 exactly
  Appliance b = a;
  b.duration_slots = 1;
  b.baseline_on_slots = {10};
  Customer cb = c;
  cb.appliances = {b};
  Schedule sb = Schedule::baseline_of(cb, grid);
  sb.on[0][9] = 0;
  sb.on[0][13] = 1;
  double pen = penalty_cost(sb, cb, grid, PenaltySchedule{0.0, 1.0, 3.0});
  if (pen != 12.0) {
    detail = "penalty fixture != 12 cents (got " + fmt(pen) + ")";
    return false;
  }

  // rank-paired shift: baseline {3,4} vs {2,6} = 3 slots
  Appliance i = a;
  i.flexibility = Flexibility::ShiftableInterruptible;
  i.duration_slots = 2;
  i.baseline_on_slots = {3, 4};
  if (shift_duration(i, {2, 6}) != 3) {
    detail = "shift fixture != 3";
    return false;
  }

  // two-bus load flow fixtures (unit bases; 0.1 pu load / export)
  FeederNetwork net({1, 2}, 1, {Branch{1, 2, 0.1, 0.0}}, 1.0, 1.0);
  SlotInjections load{{0.0, 100.0}, {0.0, 0.0}};
  LoadFlowSolution sol = solve_slot(net, load);
  const double v_load = (1.0 + std::sqrt(0.96)) / 2.0;        // 0.98990
  const double loss_pu = std::pow(0.1 / v_load, 2) * 0.1;     // 0.00102
  if (!sol.converged || std::fabs(sol.bus_voltage_pu[1] - v_load) > 1e-5 ||
      std::fabs(sol.bus_voltage_pu[1] - 0.98990) > 1e-5) {
    detail = "two-bus load voltage off: " + fmt(sol.bus_voltage_pu[1]);
    return false;
  }
  if (std::fabs(sol.total_loss_kw / 1000.0 - loss_pu) > 1e-5 ||
      std::fabs(sol.total_loss_kw / 1000.0 - 0.00102) > 1e-5) {
    detail = "two-bus loss off: " + fmt(sol.total_loss_kw / 1000.0) + " pu";
    return false;
  }
  SlotInjections exp_inj{{0.0, -100.0}, {0.0, 0.0}};
  LoadFlowSolution exp_sol = solve_slot(net, exp_inj);
  if (!exp_sol.converged ||
      std::fabs(exp_sol.bus_voltage_pu[1] - 1.00990) > 1e-5) {
    detail = "two-bus export voltage off: " + fmt(exp_sol.bus_voltage_pu[1]);
    return false;
  }
  detail = "V2=" + fmt(sol.bus_voltage_pu[1]) +
           " pu, loss=" + fmt(sol.total_loss_kw / 1000.0) +
           " pu, export V2=" + fmt(exp_sol.bus_voltage_pu[1]) + " pu";
  return true;
}

bool criterion_constraint_suite(std::string& detail) {
  std::mt19937 rng(424242);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    testgen::Instance inst = testgen::make_day_instance(rng);
    Schedule baseline = Schedule::baseline_of(inst.customer, inst.grid);
    OptimizeResult r = optimize_customer(inst.customer, inst.grid, inst.tariff,
                                         inst.penalties);

    if (!check_feasibility(r.schedule, inst.customer).empty()) ++violations;

    // explicit re-checks of the row structure
    for (std::size_t ai = 0; ai < inst.customer.appliances.size(); ++ai) {
      const Appliance& app = inst.customer.appliances[ai];
      std::vector<int> on =
          on_slot_vector(r.schedule, inst.customer, static_cast<int>(ai));
      if (static_cast<int>(on.size()) != app.duration_slots) ++violations;
      for (int t : on)
        if (t < app.window_start || t > app.window_end) ++violations;
      if (app.flexibility == Flexibility::Fixed &&
          r.schedule.on[ai] != baseline.on[ai])
        ++violations;
    }

    // infinite-penalty limit: everything pinned to baseline
    OptimizeResult frozen = optimize_customer(
        inst.customer, inst.grid, inst.tariff, PenaltySchedule::uniform(1e6));
    if (!(frozen.schedule == baseline)) ++violations;
  }
  detail = "1000 randomized cases, " + std::to_string(violations) +
           " violation(s)";
  return violations == 0;
}

bool criterion_penalty_sweep(std::string& detail) {
  Scenario scenario = load_scenario(DSM_REF_SCENARIO);
  std::vector<double> values = {0.0, 5.0, 10.0, 20.0};
  std::vector<ScenarioResult> runs = sweep(scenario, "penalty_residential",
                                           values);
  std::vector<double> utils;
  for (const ScenarioResult& r : runs) {
    if (!r.metrics.pv_utilization_residential_pct.has_value()) {
      detail = "residential pv utilization undefined";
      return false;
    }
    utils.push_back(*r.metrics.pv_utilization_residential_pct);
  }
  std::ostringstream oss;
  for (std::size_t i = 0; i < utils.size(); ++i)
    oss << (i ? " -> " : "") << fmt(utils[i]) << '%';
  detail = "residential utilization " + oss.str();
  for (std::size_t i = 1; i < utils.size(); ++i)
    if (!(utils[i] < utils[i - 1])) {
      detail += " (not strictly decreasing)";
      return false;
    }
  if (utils.front() < 90.0) {
    detail += " (endpoint below 90%)";
    return false;
  }
  return true;
}

bool criterion_participation_sweep(std::string& detail) {
  Scenario scenario = load_scenario(DSM_REF_SCENARIO);
  std::vector<ScenarioResult> runs =
      sweep(scenario, "participation_pct", {25.0, 50.0, 100.0});
  std::vector<double> losses;
  for (const ScenarioResult& r : runs)
    losses.push_back(r.metrics.daily_loss_kwh_optimized);

  Scenario no_pv = scenario;
  no_pv.options.pv_scale = 0.0;
  ScenarioResult no_pv_run = run_scenario(no_pv);
  double no_pv_loss = no_pv_run.metrics.daily_loss_kwh_optimized;

  std::ostringstream oss;
  oss << "with-PV loss " << fmt(losses[0]) << " -> " << fmt(losses[1])
      << " -> " << fmt(losses[2]) << " kWh; no-PV at 100%: "
      << fmt(no_pv_loss) << " kWh";
  detail = oss.str();

  for (std::size_t i = 1; i < losses.size(); ++i)
    if (losses[i] > losses[i - 1]) {
      detail += " (not non-increasing)";
      return false;
    }
  if (!(losses.back() < no_pv_loss)) {
    detail += " (with-PV not below no-PV)";
    return false;
  }
  return true;
}

bool criterion_voltage_rise(std::string& detail) {
  Scenario scenario = load_scenario(DSM_REF_SCENARIO);
  ScenarioResult with_pv = run_scenario(scenario);

  Scenario no_pv = scenario;
  no_pv.options.pv_scale = 0.0;
  ScenarioResult without_pv = run_scenario(no_pv);

  Scenario half = scenario;
  half.options.pv_scale = 0.5;
  ScenarioResult half_pv = run_scenario(half);

  double v_full = commercial_side_peak_voltage(with_pv);
  double v_none = commercial_side_peak_voltage(without_pv);
  double v_half = commercial_side_peak_voltage(half_pv);
  detail = "peak commercial-side voltage: full " + fmt(v_full) + ", half " +
           fmt(v_half) + ", none " + fmt(v_none) + " pu";
  return v_full > v_none && v_half < v_full;
}

bool criterion_conservation(std::string& detail) {
  Scenario scenario = load_scenario(DSM_REF_SCENARIO);
  ScenarioResult run = run_scenario(scenario);

  auto check_day = [&](const std::vector<LoadFlowSolution>& day,
                       const std::vector<Schedule>& schedules) -> bool {
    for (int t = 1; t <= run.time_grid.slots_per_day; ++t) {
      const LoadFlowSolution& sol = day[static_cast<std::size_t>(t - 1)];
      if (!sol.converged) return false;
      SlotInjections inj = build_injections(scenario.network, run.customers,
                                            schedules, t,
                                            scenario.power_factor);
      double net_sum = 0.0, abs_sum = 0.0;
      for (double p : inj.p_kw) {
        net_sum += p;
        abs_sum += std::fabs(p);
      }
      double expected = net_sum + sol.total_loss_kw;
      double tol = 1e-6 * std::max(1.0, abs_sum + sol.total_loss_kw);
      if (std::fabs(sol.slack_injection_kw - expected) > tol) return false;
    }
    return true;
  };

  std::vector<Schedule> base_scheds, opt_scheds;
  for (const CustomerOutcome& oc : run.outcomes) {
    base_scheds.push_back(oc.baseline_schedule);
    opt_scheds.push_back(oc.optimized_schedule);
  }
  if (!check_day(run.baseline_day, base_scheds) ||
      !check_day(run.optimized_day, opt_scheds)) {
    detail = "power balance residual above 1e-6 relative";
    return false;
  }

  // monotone voltage drop along the feeder on the no-PV run
  Scenario no_pv = scenario;
  no_pv.options.pv_scale = 0.0;
  ScenarioResult no_pv_run = run_scenario(no_pv);
  const auto& parent = scenario.network.parent_index();
  for (const LoadFlowSolution& sol : no_pv_run.optimized_day)
    for (std::size_t b = 0; b < sol.bus_voltage_pu.size(); ++b) {
      int p = parent[b];
      if (p < 0) continue;
      if (sol.bus_voltage_pu[b] >
          sol.bus_voltage_pu[static_cast<std::size_t>(p)] + 1e-9) {
        detail = "voltage rise without PV at bus index " + std::to_string(b);
        return false;
      }
    }
  detail = "balance within 1e-6 on 96 slots; no-PV profile monotone";
  return true;
}

bool criterion_determinism(std::string& detail) {
  const auto started = std::chrono::steady_clock::now();
  Scenario scenario = load_scenario(DSM_REF_SCENARIO);
  ScenarioResult first = run_scenario(scenario);
  const double run_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    started)
          .count();

  ScenarioResult second = run_scenario(scenario);
  auto dir1 = std::filesystem::temp_directory_path() / "dsm_acceptance_a";
  auto dir2 = std::filesystem::temp_directory_path() / "dsm_acceptance_b";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  write_results(first, dir1.string());
  write_results(second, dir2.string());

  bool identical = true;
  for (const char* name : {"summary.json", "costs.csv", "voltages.csv",
                           "losses.csv", "schedules.csv"})
    identical = identical && read_file(dir1 / name) == read_file(dir2 / name);
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);

  detail = "reference run " + fmt(run_seconds) + " s; outputs " +
           (identical ? "byte-identical" : "differ");
  return identical && run_seconds < 60.0;
}

}  // namespace

int main() {
  std::printf("acceptance suite on %s\n", DSM_REF_SCENARIO);
  run_criterion(1, "oracle equivalence", criterion_oracle_equivalence);
  run_criterion(2, "hand-computed fixtures", criterion_hand_fixtures);
  run_criterion(3, "constraint suite", criterion_constraint_suite);
  run_criterion(4, "penalty sweep pv-utilization trend",
                criterion_penalty_sweep);
  run_criterion(5, "participation sweep loss trend",
                criterion_participation_sweep);
  run_criterion(6, "reverse-flow voltage rise", criterion_voltage_rise);
  run_criterion(7, "load-flow conservation", criterion_conservation);
  run_criterion(8, "determinism and runtime", criterion_determinism);
  if (g_failures > 0)
    std::printf("%d criterion(s) failed\n", g_failures);
  else
    std::printf("all criteria passed\n");
  return g_failures;
}
