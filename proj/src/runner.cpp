#include "dsm/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dsm/scheduler.hpp"

namespace dsm {

using nlohmann::json;

namespace {

// fixed-precision text for every CSV numeric field
std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string slot_list(const std::vector<int>& slots) {
  std::ostringstream oss;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i) oss << ' ';
    oss << slots[i];
  }
  return oss.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

json entry_json(const SavingsEntry& e) {
  json j;
  j["baseline_cents"] = e.baseline_cents;
  j["optimized_cents"] = e.optimized_cents;
  if (e.reduction_pct.has_value())
    j["reduction_pct"] = *e.reduction_pct;
  else
    j["reduction_pct"] = nullptr;
  return j;
}

json voltage_json(const VoltageStats& v, const std::vector<int>& bus_ids) {
  json j;
  j["max_pu"] = v.max_voltage_pu;
  j["min_pu"] = v.min_voltage_pu;
  j["sum_abs_deviation"] = v.sum_abs_deviation;
  j["max_bus"] = v.max_bus_index >= 0
                     ? json(bus_ids[static_cast<std::size_t>(v.max_bus_index)])
                     : json(nullptr);
  j["max_slot"] = v.max_slot;
  j["min_bus"] = v.min_bus_index >= 0
                     ? json(bus_ids[static_cast<std::size_t>(v.min_bus_index)])
                     : json(nullptr);
  j["min_slot"] = v.min_slot;
  return j;
}

}  // namespace

std::vector<std::size_t> select_participants(
    const std::vector<Customer>& customers, int participation_pct,
    const std::string& commercial_dsm) {
  if (participation_pct < 0 || participation_pct > 100)
    throw std::invalid_argument("participation_pct must lie in [0, 100]");

  std::vector<std::size_t> residential;
  for (std::size_t i = 0; i < customers.size(); ++i)
    if (customers[i].kind == CustomerKind::Residential)
      residential.push_back(i);
  std::sort(residential.begin(), residential.end(),
            [&](std::size_t a, std::size_t b) {
              return customers[a].id < customers[b].id;
            });
  const auto n = static_cast<double>(residential.size());
  const auto take = static_cast<std::size_t>(
      std::ceil(participation_pct / 100.0 * n));
  residential.resize(std::min(residential.size(), take));

  std::vector<std::size_t> selected = residential;
  const bool commercial_in = commercial_dsm == "always" ||
                             (commercial_dsm == "auto" &&
                              participation_pct == 100);
  if (commercial_in)
    for (std::size_t i = 0; i < customers.size(); ++i)
      if (customers[i].kind == CustomerKind::Commercial)
        selected.push_back(i);
  std::sort(selected.begin(), selected.end());
  return selected;
}

ScenarioResult run_scenario(const Scenario& scenario) {
  scenario.validate();
  const TimeGrid& grid = scenario.time_grid;

  std::vector<Customer> customers = scenario.customers;
  for (Customer& c : customers)
    if (c.pv.has_value()) c.pv->scale *= scenario.options.pv_scale;

  std::vector<char> participates(customers.size(), 0);
  if (scenario.options.dsm_enabled)
    for (std::size_t i :
         select_participants(customers, scenario.options.participation_pct,
                             scenario.options.commercial_dsm))
      participates[i] = 1;

  ScenarioResult result;
  result.scenario_name = scenario.name;
  result.scenario_hash = scenario.source_hash;
  result.options = scenario.options;
  result.time_grid = grid;
  result.bus_ids = scenario.network.bus_ids();

  std::vector<Schedule> baseline_schedules, optimized_schedules;
  std::vector<CostBreakdown> baseline_costs, optimized_costs;
  baseline_schedules.reserve(customers.size());
  optimized_schedules.reserve(customers.size());

  for (std::size_t c = 0; c < customers.size(); ++c) {
    const Customer& cust = customers[c];
    const Tariff& tariff = scenario.tariff_for(cust.kind);
    const PenaltySchedule& penalties = scenario.penalty_for(cust.kind);

    CustomerOutcome outcome;
    outcome.baseline_schedule = Schedule::baseline_of(cust, grid);
    outcome.baseline_cost =
        total_cost(outcome.baseline_schedule, cust, grid, tariff, penalties);
    if (participates[c]) {
      OptimizeResult opt = optimize_customer(cust, grid, tariff, penalties);
      outcome.participated = true;
      outcome.optimized_schedule = std::move(opt.schedule);
      outcome.optimized_cost = opt.cost;
    } else {
      outcome.optimized_schedule = outcome.baseline_schedule;
      outcome.optimized_cost = outcome.baseline_cost;
    }

    baseline_schedules.push_back(outcome.baseline_schedule);
    optimized_schedules.push_back(outcome.optimized_schedule);
    baseline_costs.push_back(outcome.baseline_cost);
    optimized_costs.push_back(outcome.optimized_cost);
    result.outcomes.push_back(std::move(outcome));
  }

  result.baseline_day =
      solve_day(scenario.network, customers, baseline_schedules, grid,
                scenario.power_factor);
  result.optimized_day =
      solve_day(scenario.network, customers, optimized_schedules, grid,
                scenario.power_factor);
  result.metrics =
      summarize(customers, optimized_schedules, baseline_costs,
                optimized_costs, result.baseline_day, result.optimized_day,
                grid);
  result.customers = std::move(customers);
  return result;
}

Scenario with_residential_penalty(Scenario scenario, double cents_per_kwh) {
  scenario.residential_penalty = PenaltySchedule::uniform(cents_per_kwh);
  return scenario;
}

std::vector<ScenarioResult> sweep(const Scenario& scenario,
                                  const std::string& axis,
                                  const std::vector<double>& values) {
  if (values.empty())
    throw std::invalid_argument("sweep: values must be nonempty");
  std::vector<ScenarioResult> results;
  results.reserve(values.size());
  for (double v : values) {
    Scenario run = scenario;
    if (axis == "penalty_residential") {
      if (v < 0.0)
        throw std::invalid_argument("sweep: penalty must be nonnegative");
      run = with_residential_penalty(std::move(run), v);
    } else if (axis == "participation_pct") {
      if (v != std::floor(v) || v < 0.0 || v > 100.0)
        throw std::invalid_argument(
            "sweep: participation_pct values must be whole numbers in "
            "[0, 100]");
      run.options.participation_pct = static_cast<int>(v);
    } else if (axis == "pv_scale") {
      if (v < 0.0)
        throw std::invalid_argument("sweep: pv_scale must be nonnegative");
      run.options.pv_scale = v;
    } else {
      throw std::invalid_argument("sweep: unknown axis '" + axis +
                                  "' (expected penalty_residential, "
                                  "participation_pct, or pv_scale)");
    }
    results.push_back(run_scenario(run));
  }
  return results;
}

namespace {

void write_costs_csv(const ScenarioResult& r,
                     const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "id,kind,baseline_cents,optimized_cents,reduction_pct,"
         "penalty_cents\n";
  for (std::size_t c = 0; c < r.customers.size(); ++c) {
    const Customer& cust = r.customers[c];
    const CustomerOutcome& oc = r.outcomes[c];
    double base = oc.baseline_cost.total_cents;
    double opt = oc.optimized_cost.total_cents;
    out << cust.id << ',' << to_string(cust.kind) << ',' << fmt_g(base) << ','
        << fmt_g(opt) << ',';
    if (base > 0.0)
      out << fmt_g(100.0 * (base - opt) / base);
    else
      out << "na";
    out << ',' << fmt_g(oc.optimized_cost.penalty_cents) << '\n';
  }
}

void write_voltages_csv(const ScenarioResult& r,
                        const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "run,slot";
  for (int bus : r.bus_ids) out << ",bus_" << bus;
  out << '\n';
  auto dump_run = [&](const char* run,
                      const std::vector<LoadFlowSolution>& day) {
    for (std::size_t s = 0; s < day.size(); ++s) {
      out << run << ',' << s + 1;
      for (double v : day[s].bus_voltage_pu) out << ',' << fmt_g(v);
      out << '\n';
    }
  };
  dump_run("baseline", r.baseline_day);
  dump_run("optimized", r.optimized_day);
}

void write_losses_csv(const ScenarioResult& r,
                      const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "run,slot,total_loss_kw\n";
  auto dump_run = [&](const char* run,
                      const std::vector<LoadFlowSolution>& day) {
    for (std::size_t s = 0; s < day.size(); ++s)
      out << run << ',' << s + 1 << ',' << fmt_g(day[s].total_loss_kw)
          << '\n';
  };
  dump_run("baseline", r.baseline_day);
  dump_run("optimized", r.optimized_day);
}

void write_schedules_csv(const ScenarioResult& r,
                         const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "customer_id,appliance_id,flexibility,criticality,rating_kw,"
         "baseline_slots,optimized_slots,shift_slots\n";
  for (std::size_t c = 0; c < r.customers.size(); ++c) {
    const Customer& cust = r.customers[c];
    const CustomerOutcome& oc = r.outcomes[c];
    for (std::size_t a = 0; a < cust.appliances.size(); ++a) {
      const Appliance& app = cust.appliances[a];
      std::vector<int> opt_slots = on_slot_vector(
          oc.optimized_schedule, cust, static_cast<int>(a));
      out << cust.id << ',' << app.id << ',' << to_string(app.flexibility)
          << ',' << to_string(app.criticality) << ',' << fmt_g(app.rating_kw)
          << ',' << slot_list(app.baseline_on_slots) << ','
          << slot_list(opt_slots) << ',' << shift_duration(app, opt_slots)
          << '\n';
    }
  }
}

void write_summary_json(const ScenarioResult& r,
                        const std::filesystem::path& path) {
  const MetricsSummary& m = r.metrics;
  json doc;
  doc["provenance"] = {
      {"version", kVersion},
      {"scenario_name", r.scenario_name},
      {"scenario_hash", r.scenario_hash},
      {"options",
       {{"participation_pct", r.options.participation_pct},
        {"pv_scale", r.options.pv_scale},
        {"dsm_enabled", r.options.dsm_enabled},
        {"commercial_dsm", r.options.commercial_dsm}}}};

  auto opt_json = [](const std::optional<double>& v) {
    return v.has_value() ? json(*v) : json(nullptr);
  };
  doc["pv_utilization_pct"] = {
      {"residential", opt_json(m.pv_utilization_residential_pct)},
      {"commercial", opt_json(m.pv_utilization_commercial_pct)},
      {"overall", opt_json(m.pv_utilization_overall_pct)}};

  json per_customer = json::object();
  for (const auto& [id, e] : m.savings.per_customer)
    per_customer[id] = entry_json(e);
  json per_area = json::object();
  for (const auto& [area, e] : m.savings.per_area) per_area[area] = entry_json(e);
  doc["costs"] = {{"per_customer", std::move(per_customer)},
                  {"per_area", std::move(per_area)},
                  {"overall", entry_json(m.savings.overall)}};

  doc["daily_loss_kwh"] = {{"baseline", m.daily_loss_kwh_baseline},
                           {"optimized", m.daily_loss_kwh_optimized}};
  doc["loss_reduction_pct"] = opt_json(m.loss_reduction_pct);
  doc["voltage"] = {{"baseline", voltage_json(m.voltage_baseline, r.bus_ids)},
                    {"optimized", voltage_json(m.voltage_optimized, r.bus_ids)}};

  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

}  // namespace

void write_results(const ScenarioResult& result, const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_summary_json(result, dir / "summary.json");
  write_costs_csv(result, dir / "costs.csv");
  write_voltages_csv(result, dir / "voltages.csv");
  write_losses_csv(result, dir / "losses.csv");
  write_schedules_csv(result, dir / "schedules.csv");
}

void write_sweep(const std::vector<ScenarioResult>& results,
                 const std::string& axis, const std::vector<double>& values,
                 const std::string& out_dir) {
  if (results.size() != values.size())
    throw std::invalid_argument("write_sweep: results/values length mismatch");
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  std::ofstream out = open_out(dir / "sweep.csv");
  out << "axis,value,pv_utilization_residential_pct,"
         "pv_utilization_commercial_pct,pv_utilization_overall_pct,"
         "cost_reduction_residential_pct,cost_reduction_commercial_pct,"
         "cost_reduction_overall_pct,daily_loss_kwh_baseline,"
         "daily_loss_kwh_optimized,loss_reduction_pct,max_voltage_pu,"
         "min_voltage_pu,voltage_deviation\n";

  auto cell = [](const std::optional<double>& v) {
    return v.has_value() ? fmt_g(*v) : std::string("na");
  };
  auto area_reduction = [](const ScenarioResult& r, const std::string& area)
      -> std::optional<double> {
    auto it = r.metrics.savings.per_area.find(area);
    if (it == r.metrics.savings.per_area.end()) return std::nullopt;
    return it->second.reduction_pct;
  };

  for (std::size_t i = 0; i < results.size(); ++i) {
    const ScenarioResult& r = results[i];
    const MetricsSummary& m = r.metrics;
    out << axis << ',' << fmt_g(values[i]) << ','
        << cell(m.pv_utilization_residential_pct) << ','
        << cell(m.pv_utilization_commercial_pct) << ','
        << cell(m.pv_utilization_overall_pct) << ','
        << cell(area_reduction(r, "residential")) << ','
        << cell(area_reduction(r, "commercial")) << ','
        << cell(m.savings.overall.reduction_pct) << ','
        << fmt_g(m.daily_loss_kwh_baseline) << ','
        << fmt_g(m.daily_loss_kwh_optimized) << ','
        << cell(m.loss_reduction_pct) << ','
        << fmt_g(m.voltage_optimized.max_voltage_pu) << ','
        << fmt_g(m.voltage_optimized.min_voltage_pu) << ','
        << fmt_g(m.voltage_optimized.sum_abs_deviation) << '\n';

    std::ostringstream sub;
    sub << axis << '_' << fmt_g(values[i]);
    write_results(r, (dir / sub.str()).string());
  }
}

}  // namespace dsm
