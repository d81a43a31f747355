// Generates the reference scenario: a 30-bus radial feeder with 29
// residential customers and one commercial site on bus 17, synthesized TOU
// curves, PV bells, and appliance inventories. Deterministic; run it to
// regenerate data/ref30.json after changing any knob below.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "dsm/scenario.hpp"

using namespace dsm;

namespace {

constexpr int kSlots = 48;
constexpr double kSlotHours = 0.5;

// tariff shapes: residential evening peak, commercial business-hours peak
double residential_price(double hour) {
  if (hour < 7.0) return 8.0;
  if (hour < 9.0) return 13.0;
  if (hour < 17.0) return 9.0;
  if (hour < 21.0) return 24.0;
  return 10.0;
}

double commercial_price(double hour) {
  if (hour < 8.0) return 7.0;
  if (hour < 9.0) return 10.0;
  if (hour < 17.0) return 22.0;
  if (hour < 20.0) return 12.0;
  return 8.0;
}

// PV bell over 08:00-18:00 peaking at 13:00
constexpr double kPvStartHour = 8.0;
constexpr double kPvSpanHours = 11.0;

std::vector<double> pv_bell(double peak_kw) {
  std::vector<double> gen(kSlots, 0.0);
  for (int t = 1; t <= kSlots; ++t) {
    double mid = (t - 0.5) * kSlotHours;
    double x = (mid - kPvStartHour) / kPvSpanHours;
    if (x > 0.0 && x < 1.0) gen[t - 1] = peak_kw * std::sin(M_PI * x);
  }
  return gen;
}

std::vector<double> tariff_curve(double (*price)(double)) {
  std::vector<double> out(kSlots);
  for (int t = 1; t <= kSlots; ++t) out[t - 1] = price((t - 0.5) * kSlotHours);
  return out;
}

std::vector<int> contiguous(int start, int count) {
  std::vector<int> slots(count);
  std::iota(slots.begin(), slots.end(), start);
  return slots;
}

Appliance make(const std::string& id, double rating, int duration, int ws,
               int we, Flexibility flex, Criticality crit,
               std::vector<int> baseline) {
  Appliance a;
  a.id = id;
  a.rating_kw = rating;
  a.duration_slots = duration;
  a.window_start = ws;
  a.window_end = we;
  a.flexibility = flex;
  a.criticality = crit;
  a.baseline_on_slots = std::move(baseline);
  return a;
}

Customer make_household(int idx, int bus) {
  // four archetypes cycled by index; ratings vary by a small size factor
  const int arch = idx % 4;  // 0 pool pump, 1 dryer, 2 dishwasher, 3 EV
  const double v = 0.9 + 0.1 * (idx % 3);
  const int s2 = idx % 2;
  const int s3 = idx % 3;

  Customer c;
  c.id = (idx + 1 < 10 ? "h0" : "h") + std::to_string(idx + 1);
  c.kind = CustomerKind::Residential;
  c.bus = bus;
  c.has_pv = true;

  const auto F = Flexibility::Fixed;
  const auto U = Flexibility::ShiftableUninterruptible;
  const auto I = Flexibility::ShiftableInterruptible;
  const auto low = Criticality::Low;

  // always-on refrigeration and standby load
  c.appliances.push_back(
      make("base", 0.45 * v, 48, 1, 48, F, low, contiguous(1, 48)));
  // dinner cooking, immovable
  int cook_start = 36 + s3;
  c.appliances.push_back(make("cook", 1.40 * v, 3, cook_start, cook_start + 2,
                              F, low, contiguous(cook_start, 3)));
  // washer: one 1.5 h block; baseline morning/midday/evening by household
  int washer_start = s3 == 0 ? 17 + s2 : (s3 == 1 ? 26 : 40);
  c.appliances.push_back(
      make("washer", 1.00 * v, 3, 15, 46, U, low, contiguous(washer_start, 3)));
  // water heater: interruptible, day-wide window
  int wh_start = s3 == 0 ? 11 : (s3 == 1 ? 24 : 35);
  c.appliances.push_back(
      make("waterheater", 1.80 * v, 5, 1, 48, I, low, contiguous(wh_start, 5)));

  double pv_peak = 0.0;
  double md = 0.0;
  switch (arch) {
    case 0:
      c.appliances.push_back(
          make("poolpump", 0.90 * v, 6, 15, 44, I, low, contiguous(25 + s3, 6)));
      pv_peak = 1.00;
      md = 6.5 * v;
      break;
    case 1:
      c.appliances.push_back(
          make("dryer", 2.20 * v, 2, 15, 46, U, low, contiguous(42 + s2, 2)));
      pv_peak = 0.85;
      md = 7.5 * v;
      break;
    case 2:
      c.appliances.push_back(
          make("dishwasher", 1.30 * v, 2, 15, 48, U, low, contiguous(44, 2)));
      pv_peak = 0.85;
      md = 7.5 * v;
      break;
    default:
      // overnight charging window: plugged in at midnight, done by 08:00
      c.appliances.push_back(make("ev", 3.30, 6, 1, 16, I, low,
                                  contiguous(3 + s3, 6)));
      pv_peak = 1.25;
      md = 9.5 * v;
      break;
  }

  c.max_demand_kw = md;
  c.pv = PvProfile{pv_bell(pv_peak), 1.0};
  return c;
}

Customer make_commercial() {
  Customer c;
  c.id = "c01";
  c.kind = CustomerKind::Commercial;
  c.bus = 17;
  c.has_pv = true;
  c.max_demand_kw = 160.0;
  c.pv = PvProfile{pv_bell(80.0), 1.0};

  const auto F = Flexibility::Fixed;
  const auto U = Flexibility::ShiftableUninterruptible;
  const auto I = Flexibility::ShiftableInterruptible;
  const auto L = Criticality::Low;
  const auto M = Criticality::Med;
  const auto H = Criticality::High;

  auto add = [&](const std::string& id, double r, int d, int ws, int we,
                 Flexibility f, Criticality crit, int base_start) {
    c.appliances.push_back(make(id, r, d, ws, we, f, crit,
                                contiguous(base_start, d)));
  };

  add("it_base", 8.0, 48, 1, 48, F, L, 1);
  add("security", 1.5, 48, 1, 48, F, L, 1);
  // production line runs the full business day and cannot move
  add("production", 25.0, 16, 19, 34, F, H, 19);

  add("proc_high", 18.0, 4, 19, 34, U, H, 24);

  // shift-bound process loads: morning and afternoon crews, windows reaching
  // into the midday PV bowl
  add("chiller_am", 12.0, 5, 15, 28, I, M, 19);
  add("chiller_pm", 12.0, 5, 25, 40, I, M, 30);
  add("oven", 10.0, 4, 17, 26, U, M, 19);
  add("compressor", 8.0, 5, 26, 42, I, M, 31);
  add("freezer_boost", 9.0, 3, 18, 28, U, M, 20);

  add("hvac_am", 10.0, 6, 15, 27, I, L, 17);
  add("hvac_pm", 10.0, 6, 25, 40, I, L, 29);
  add("lighting_flex", 6.0, 8, 15, 26, I, L, 16);
  add("pump_am", 5.0, 6, 14, 26, I, L, 19);
  add("pump_pm", 5.0, 6, 25, 44, I, L, 29);
  add("washdown", 7.0, 3, 28, 42, U, L, 31);
  add("conveyor", 8.0, 5, 15, 26, U, L, 19);
  add("battery_room", 4.0, 8, 1, 48, I, L, 20);
  add("water_treat", 6.0, 6, 25, 46, I, L, 30);

  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::string out_path = argc > 1 ? argv[1] : "data/ref30.json";

  TimeGrid grid{kSlots, kSlotHours};

  // radial main: bus 1 (substation) .. bus 30, uniform branch impedance
  std::vector<int> buses(30);
  std::iota(buses.begin(), buses.end(), 1);
  std::vector<Branch> branches;
  for (int b = 1; b < 30; ++b)
    branches.push_back(Branch{b, b + 1, 2.5, 1.25});
  FeederNetwork network(buses, 1, branches, 12.66, 1.0);

  std::vector<Customer> customers;
  int idx = 0;
  for (int bus = 2; bus <= 30; ++bus) {
    if (bus == 17) continue;
    customers.push_back(make_household(idx++, bus));
  }
  customers.push_back(make_household(idx++, 30));  // 29th household
  customers.push_back(make_commercial());

  Scenario scenario{"ref30",
                    grid,
                    Tariff{tariff_curve(residential_price)},
                    Tariff{tariff_curve(commercial_price)},
                    PenaltySchedule::uniform(0.0),
                    PenaltySchedule{0.0, 1.0, 3.0},
                    0.95,
                    std::move(customers),
                    std::move(network),
                    ScenarioOptions{},
                    ""};
  scenario.validate();

  nlohmann::json doc = nlohmann::json::parse(scenario_to_json(scenario));
  doc["provenance"] =
      "synthesized reference scenario: TOU curves, PV profiles, appliance "
      "inventories, and feeder impedances are artifact-constructed to match "
      "qualitative shapes (residential evening price peak, commercial "
      "09:00-17:00 peak, midday PV bell); they are not measured data";

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << out_path << '\n';
    return 1;
  }
  out << doc.dump(2) << '\n';

  std::size_t appliance_count = 0;
  double pv_daily_kwh = 0.0;
  for (const Customer& c : scenario.customers) {
    appliance_count += c.appliances.size();
    if (c.pv.has_value())
      for (double g : c.pv->generation_kw) pv_daily_kwh += g * kSlotHours;
  }
  std::cout << "wrote " << out_path << ": " << scenario.customers.size()
            << " customers, " << appliance_count << " appliances, "
            << pv_daily_kwh << " kWh/day PV\n";
  return 0;
}
