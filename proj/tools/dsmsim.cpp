#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsm/kernels.hpp"
#include "dsm/runner.hpp"

namespace {

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

void fail(const std::string& type, const std::string& message) {
  nlohmann::json err{{"error", message}, {"type", type}};
  std::cerr << err.dump() << '\n';
  std::exit(1);
}

void apply_kernel_choice(const std::string& kernel) {
  if (kernel == "auto") return;
  if (kernel == "scalar") {
    dsm::kernels::force_backend(dsm::kernels::Backend::Scalar);
    return;
  }
  if (kernel == "avx2") {
    if (!dsm::kernels::avx2_available())
      fail("usage", "this CPU does not support AVX2");
    dsm::kernels::force_backend(dsm::kernels::Backend::Avx2);
    return;
  }
  fail("usage", "unknown kernel backend '" + kernel + "'");
}

void print_run_summary(const dsm::ScenarioResult& r) {
  const dsm::MetricsSummary& m = r.metrics;
  auto pct = [](const std::optional<double>& v) {
    return v.has_value() ? std::to_string(*v) : std::string("n/a");
  };
  std::cout << "scenario " << r.scenario_name << " (hash " << r.scenario_hash
            << ")\n"
            << "  participants: "
            << [&] {
                 int n = 0;
                 for (const auto& o : r.outcomes) n += o.participated ? 1 : 0;
                 return n;
               }()
            << "/" << r.outcomes.size() << '\n'
            << "  cost reduction overall: "
            << pct(m.savings.overall.reduction_pct) << " %\n"
            << "  pv utilization residential: "
            << pct(m.pv_utilization_residential_pct) << " %\n"
            << "  daily loss: " << m.daily_loss_kwh_baseline
            << " kWh baseline, " << m.daily_loss_kwh_optimized
            << " kWh optimized\n"
            << "  voltage range optimized: ["
            << m.voltage_optimized.min_voltage_pu << ", "
            << m.voltage_optimized.max_voltage_pu << "] pu\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"day-ahead appliance scheduling with feeder impact analysis"};
  app.require_subcommand(1);
  app.fallthrough();  // allow --kernel after the subcommand

  std::string kernel = "auto";
  app.add_option("--kernel", kernel,
                 "arithmetic backend: auto, scalar, or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  std::string scenario_path, out_dir, axis, values_csv;
  bool no_dsm = false, no_pv = false;
  double pv_scale = -1.0, penalty_res = -1.0;
  int participation = -1;

  CLI::App* run = app.add_subcommand("run", "run one scenario");
  run->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_flag("--no-dsm", no_dsm, "keep every schedule at baseline");
  run->add_flag("--no-pv", no_pv, "disable all PV generation");
  run->add_option("--pv-scale", pv_scale, "PV penetration multiplier");
  run->add_option("--participation", participation,
                  "residential DSM participation percent");
  run->add_option("--penalty-res", penalty_res,
                  "uniform residential penalty price in cents/kWh");

  CLI::App* sw = app.add_subcommand("sweep", "run a parameter sweep");
  sw->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  sw->add_option("--axis", axis,
                 "penalty_residential, participation_pct, or pv_scale")
      ->required();
  sw->add_option("--values", values_csv, "comma-separated axis values")
      ->required();
  sw->add_option("--out", out_dir, "output directory")->required();

  CLI::App* val = app.add_subcommand("validate", "validate a scenario file");
  val->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();

  CLI11_PARSE(app, argc, argv);
  apply_kernel_choice(kernel);

  try {
    dsm::Scenario scenario = dsm::load_scenario(scenario_path);

    if (val->parsed()) {
      std::cout << "ok: " << scenario.name << " ("
                << scenario.customers.size() << " customers, "
                << scenario.network.bus_count() << " buses, T="
                << scenario.time_grid.slots_per_day << ", hash "
                << scenario.source_hash << ")\n";
      return 0;
    }

    if (run->parsed()) {
      if (no_dsm) scenario.options.dsm_enabled = false;
      if (pv_scale >= 0.0) scenario.options.pv_scale = pv_scale;
      if (no_pv) scenario.options.pv_scale = 0.0;
      if (participation >= 0)
        scenario.options.participation_pct = participation;
      if (penalty_res >= 0.0)
        scenario = dsm::with_residential_penalty(std::move(scenario),
                                                 penalty_res);
      dsm::ScenarioResult result = dsm::run_scenario(scenario);
      dsm::write_results(result, out_dir);
      print_run_summary(result);
      std::cout << "wrote " << out_dir << "/{summary.json,costs.csv,"
                << "voltages.csv,losses.csv,schedules.csv}\n";
      return 0;
    }

    if (sw->parsed()) {
      std::vector<double> values = parse_values(values_csv);
      std::vector<dsm::ScenarioResult> results =
          dsm::sweep(scenario, axis, values);
      dsm::write_sweep(results, axis, values, out_dir);
      std::cout << "swept " << axis << " over " << values.size()
                << " value(s); wrote " << out_dir << "/sweep.csv\n";
      return 0;
    }
  } catch (const dsm::ValidationError& e) {
    fail("validation", e.what());
  } catch (const dsm::ConvergenceError& e) {
    fail("convergence", e.what());
  } catch (const std::invalid_argument& e) {
    fail("usage", e.what());
  } catch (const std::exception& e) {
    fail("runtime", e.what());
  }
  return 0;
}
