#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dsm/scheduler.hpp"
#include "instance_gen.hpp"

using namespace dsm;

namespace {

const TimeGrid kGrid{48, 0.5};

Tariff flat_tariff(double cents) {
  return Tariff{std::vector<double>(48, cents)};
}

Appliance make_appliance(const std::string& id, double rating, int duration,
                         int ws, int we, Flexibility flex,
                         std::vector<int> baseline,
                         Criticality crit = Criticality::Low) {
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

Customer single(const Appliance& a, double md = 100.0) {
  Customer c;
  c.id = "c";
  c.kind = CustomerKind::Residential;
  c.bus = 1;
  c.max_demand_kw = md;
  c.appliances = {a};
  return c;
}

}  // namespace

TEST_CASE("electricity cost hand fixtures") {
  SUBCASE("all-off schedule costs nothing") {
    Customer c;
    c.id = "none";
    c.max_demand_kw = 1.0;
    Schedule s = Schedule::baseline_of(c, kGrid);
    CHECK(electricity_cost(s, c, kGrid, flat_tariff(10.0)) == 0.0);
  }
  SUBCASE("2 kW for two half-hour slots at 10 cents/kWh is 20 cents") {
    Customer c = single(make_appliance(
        "a", 2.0, 2, 1, 48, Flexibility::ShiftableUninterruptible, {1, 2}));
    Schedule s = Schedule::baseline_of(c, kGrid);
    CHECK(electricity_cost(s, c, kGrid, flat_tariff(10.0)) == 20.0);
  }
  SUBCASE("pv covering the first slot halves it") {
    Customer c = single(make_appliance(
        "a", 2.0, 2, 1, 48, Flexibility::ShiftableUninterruptible, {1, 2}));
    c.has_pv = true;
    PvProfile pv;
    pv.generation_kw.assign(48, 0.0);
    pv.generation_kw[0] = 2.0;
    c.pv = pv;
    Schedule s = Schedule::baseline_of(c, kGrid);
    CHECK(electricity_cost(s, c, kGrid, flat_tariff(10.0)) == 10.0);
  }
  SUBCASE("tariff length mismatch rejected") {
    Customer c = single(make_appliance(
        "a", 2.0, 1, 1, 48, Flexibility::ShiftableInterruptible, {1}));
    Schedule s = Schedule::baseline_of(c, kGrid);
    Tariff bad{std::vector<double>(24, 10.0)};
    CHECK_THROWS_AS(electricity_cost(s, c, kGrid, bad), std::invalid_argument);
  }
}

TEST_CASE("shift duration rank pairing") {
  Appliance a = make_appliance("a", 1.0, 1, 1, 48,
                               Flexibility::ShiftableUninterruptible, {10});
  CHECK(shift_duration(a, {10}) == 0);
  CHECK(shift_duration(a, {14}) == 4);

  Appliance b = make_appliance("b", 1.0, 2, 1, 48,
                               Flexibility::ShiftableInterruptible, {3, 4});
  CHECK(shift_duration(b, {2, 6}) == 3);
  CHECK_THROWS_AS(shift_duration(b, {2, 3, 4}), std::invalid_argument);
}

TEST_CASE("penalty cost") {
  // r=2 kW shifted by 4 slots at 3 cents/kWh: 0.5 * 3 * 2 * 4 = 12 cents
  Appliance a = make_appliance("a", 2.0, 1, 1, 48,
                               Flexibility::ShiftableUninterruptible, {10},
                               Criticality::High);
  Customer c = single(a);
  Schedule s = Schedule::baseline_of(c, kGrid);
  s.on[0][9] = 0;
  s.on[0][13] = 1;  // moved to slot 14

  PenaltySchedule commercial{0.0, 1.0, 3.0};  // the paper's tier mapping
  CHECK(penalty_cost(s, c, kGrid, commercial) == 12.0);
  CHECK(penalty_cost(s, c, kGrid, PenaltySchedule::uniform(0.0)) == 0.0);

  // med tier picks the middle price
  Appliance med = a;
  med.criticality = Criticality::Med;
  Customer cm = single(med);
  CHECK(penalty_cost(s, cm, kGrid, commercial) == doctest::Approx(4.0));
}

TEST_CASE("total cost composes the parts") {
  Customer c;
  c.id = "two";
  c.max_demand_kw = 100.0;
  c.appliances = {
      make_appliance("load", 2.0, 2, 1, 48,
                     Flexibility::ShiftableUninterruptible, {1, 2}),
      make_appliance("shifted", 2.0, 1, 1, 48,
                     Flexibility::ShiftableUninterruptible, {10},
                     Criticality::High)};
  Schedule s = Schedule::baseline_of(c, kGrid);
  s.on[1][9] = 0;
  s.on[1][13] = 1;

  // electricity beyond the first appliance: slot 14 at 10 cents, 2 kW
  Tariff tariff = flat_tariff(10.0);
  CostBreakdown cb = total_cost(s, c, kGrid, tariff,
                                PenaltySchedule{0.0, 1.0, 3.0});
  CHECK(cb.electricity_cents == doctest::Approx(30.0));
  CHECK(cb.penalty_cents == doctest::Approx(12.0));
  CHECK(cb.total_cents == cb.electricity_cents + cb.penalty_cents);
  CHECK(cb.per_appliance_shift_slots.at("load") == 0);
  CHECK(cb.per_appliance_shift_slots.at("shifted") == 4);

  // baseline schedule: zero penalty by construction
  CostBreakdown base = total_cost(Schedule::baseline_of(c, kGrid), c, kGrid,
                                  tariff, PenaltySchedule{0.0, 1.0, 3.0});
  CHECK(base.penalty_cents == 0.0);
}

TEST_CASE("optimizer hand fixtures") {
  SUBCASE("flat tariff, no pv, no penalty: baseline cost is optimal") {
    Customer c = single(make_appliance(
        "a", 1.5, 3, 5, 20, Flexibility::ShiftableUninterruptible, {8, 9, 10}));
    Tariff t = flat_tariff(12.0);
    OptimizeResult r =
        optimize_customer(c, kGrid, t, PenaltySchedule::uniform(0.0));
    Schedule base = Schedule::baseline_of(c, kGrid);
    CHECK(r.cost.total_cents ==
          doctest::Approx(
              total_cost(base, c, kGrid, t, PenaltySchedule::uniform(0.0))
                  .total_cents));
  }
  SUBCASE("price valley pulls a free appliance to the earliest cheap slot") {
    // prices 10,30,10,10 over the window; penalty 0: slot 1 wins the tie
    Tariff t = flat_tariff(10.0);
    t.price_cents_per_kwh[1] = 30.0;
    Customer c = single(make_appliance(
        "a", 1.0, 1, 1, 4, Flexibility::ShiftableUninterruptible, {2}));
    OptimizeResult r =
        optimize_customer(c, kGrid, t, PenaltySchedule::uniform(0.0));
    CHECK(on_slot_vector(r.schedule, c, 0) == std::vector<int>{1});
    CHECK(r.cost.total_cents == doctest::Approx(5.0));

    OptimizeResult bf =
        brute_force_optimal(c, kGrid, t, PenaltySchedule::uniform(0.0));
    CHECK(bf.cost.total_cents == doctest::Approx(5.0));
  }
  SUBCASE("a 25 cent penalty freezes the same appliance at baseline") {
    Tariff t = flat_tariff(10.0);
    t.price_cents_per_kwh[1] = 30.0;
    Customer c = single(make_appliance(
        "a", 1.0, 1, 1, 4, Flexibility::ShiftableUninterruptible, {2}));
    OptimizeResult r =
        optimize_customer(c, kGrid, t, PenaltySchedule::uniform(25.0));
    CHECK(on_slot_vector(r.schedule, c, 0) == std::vector<int>{2});
    CHECK(r.cost.total_cents == doctest::Approx(15.0));
  }
  SUBCASE("max demand forces two appliances apart") {
    Tariff t = flat_tariff(10.0);
    t.price_cents_per_kwh[0] = 5.0;  // both want slot 1
    Customer c;
    c.id = "pair";
    c.max_demand_kw = 5.0;
    c.appliances = {make_appliance("a", 3.0, 1, 1, 2,
                                   Flexibility::ShiftableUninterruptible, {1}),
                    make_appliance("b", 3.0, 1, 1, 2,
                                   Flexibility::ShiftableUninterruptible,
                                   {2})};
    OptimizeResult bf =
        brute_force_optimal(c, kGrid, t, PenaltySchedule::uniform(0.0));
    CHECK(check_feasibility(bf.schedule, c).empty());
    // one appliance at 5 cents, the other pushed to 10
    CHECK(bf.cost.total_cents == doctest::Approx(0.5 * 3 * 5 + 0.5 * 3 * 10));

    OptimizeResult cd =
        optimize_customer(c, kGrid, t, PenaltySchedule::uniform(0.0));
    CHECK(check_feasibility(cd.schedule, c).empty());
    CHECK(cd.cost.total_cents == doctest::Approx(bf.cost.total_cents));
  }
  SUBCASE("interruptible appliance splits around an expensive slot") {
    Tariff t = flat_tariff(10.0);
    t.price_cents_per_kwh[5] = 50.0;
    Customer c = single(make_appliance("a", 2.0, 3, 5, 8,
                                       Flexibility::ShiftableInterruptible,
                                       {5, 6, 7}));
    OptimizeResult r =
        optimize_customer(c, kGrid, t, PenaltySchedule::uniform(0.0));
    CHECK(on_slot_vector(r.schedule, c, 0) == std::vector<int>{5, 7, 8});
  }
}

TEST_CASE("optimizer never worsens and descends monotonically") {
  std::mt19937 rng(101);
  for (int i = 0; i < 200; ++i) {
    auto inst = testgen::make_day_instance(rng);
    OptimizeResult r = optimize_customer(inst.customer, inst.grid, inst.tariff,
                                         inst.penalties);
    REQUIRE(!r.objective_trace.empty());
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k)
      CHECK(r.objective_trace[k] <= r.objective_trace[k - 1] + 1e-9);
    CHECK(r.cost.total_cents <= r.objective_trace.front() + 1e-9);
    CHECK(check_feasibility(r.schedule, inst.customer).empty());
  }
}

TEST_CASE("fixed appliances never move") {
  std::mt19937 rng(202);
  int fixed_seen = 0;
  for (int i = 0; i < 100; ++i) {
    auto inst = testgen::make_day_instance(rng);
    Schedule base = Schedule::baseline_of(inst.customer, inst.grid);
    OptimizeResult r = optimize_customer(inst.customer, inst.grid, inst.tariff,
                                         inst.penalties);
    for (std::size_t a = 0; a < inst.customer.appliances.size(); ++a) {
      if (inst.customer.appliances[a].flexibility != Flexibility::Fixed)
        continue;
      ++fixed_seen;
      CHECK(r.schedule.on[a] == base.on[a]);
    }
  }
  CHECK(fixed_seen > 0);
}

TEST_CASE("optimizer is deterministic") {
  std::mt19937 rng(303);
  for (int i = 0; i < 20; ++i) {
    auto inst = testgen::make_day_instance(rng);
    OptimizeResult r1 = optimize_customer(inst.customer, inst.grid,
                                          inst.tariff, inst.penalties);
    OptimizeResult r2 = optimize_customer(inst.customer, inst.grid,
                                          inst.tariff, inst.penalties);
    CHECK(r1.schedule == r2.schedule);
    CHECK(r1.cost.total_cents == r2.cost.total_cents);
  }
}

TEST_CASE("oracle equivalence on non-interacting instances") {
  std::mt19937 rng(404);
  for (int i = 0; i < 60; ++i) {
    auto inst = testgen::make_oracle_instance(rng, /*interacting=*/false);
    OptimizeResult cd = optimize_customer(inst.customer, inst.grid,
                                          inst.tariff, inst.penalties);
    OptimizeResult bf = brute_force_optimal(inst.customer, inst.grid,
                                            inst.tariff, inst.penalties);
    double scale = std::max(1.0, std::abs(bf.cost.total_cents));
    CHECK(std::abs(cd.cost.total_cents - bf.cost.total_cents) <=
          1e-9 * scale);
  }
}

TEST_CASE("interacting instances stay feasible and never-worse") {
  std::mt19937 rng(505);
  for (int i = 0; i < 40; ++i) {
    auto inst = testgen::make_oracle_instance(rng, /*interacting=*/true);
    OptimizeResult cd = optimize_customer(inst.customer, inst.grid,
                                          inst.tariff, inst.penalties);
    OptimizeResult bf = brute_force_optimal(inst.customer, inst.grid,
                                            inst.tariff, inst.penalties);
    CHECK(check_feasibility(cd.schedule, inst.customer).empty());
    CHECK(cd.cost.total_cents <= cd.objective_trace.front() + 1e-9);
    CHECK(cd.cost.total_cents >= bf.cost.total_cents - 1e-9);
  }
}

TEST_CASE("single-block descent equals the oracle even with pv and md") {
  std::mt19937 rng(606);
  int done = 0;
  while (done < 30) {
    auto inst = testgen::make_oracle_instance(rng, /*interacting=*/true, 1);
    OptimizeResult cd = optimize_customer(inst.customer, inst.grid,
                                          inst.tariff, inst.penalties);
    OptimizeResult bf = brute_force_optimal(inst.customer, inst.grid,
                                            inst.tariff, inst.penalties);
    double scale = std::max(1.0, std::abs(bf.cost.total_cents));
    CHECK(std::abs(cd.cost.total_cents - bf.cost.total_cents) <=
          1e-9 * scale);
    ++done;
  }
}

TEST_CASE("infinite penalty pins every flexible appliance to baseline") {
  std::mt19937 rng(707);
  for (int i = 0; i < 50; ++i) {
    auto inst = testgen::make_day_instance(rng);
    Schedule base = Schedule::baseline_of(inst.customer, inst.grid);
    OptimizeResult r = optimize_customer(inst.customer, inst.grid, inst.tariff,
                                         PenaltySchedule::uniform(1e6));
    CHECK(r.schedule == base);
  }
}

TEST_CASE("cheapest-slots closed form when nothing binds") {
  // no pv, loose md, zero penalty: each appliance independently takes its
  // cheapest admissible slots
  std::mt19937 rng(808);
  for (int i = 0; i < 40; ++i) {
    auto inst = testgen::make_oracle_instance(rng, /*interacting=*/false);
    OptimizeResult r = optimize_customer(inst.customer, inst.grid, inst.tariff,
                                         PenaltySchedule::uniform(0.0));
    double expected = 0.0;
    for (const Appliance& app : inst.customer.appliances) {
      std::vector<double> window_prices;
      for (int t = app.window_start; t <= app.window_end; ++t)
        window_prices.push_back(
            inst.tariff.price_cents_per_kwh[static_cast<std::size_t>(t - 1)]);
      if (app.flexibility == Flexibility::ShiftableInterruptible) {
        std::sort(window_prices.begin(), window_prices.end());
        for (int k = 0; k < app.duration_slots; ++k)
          expected += inst.grid.slot_hours * app.rating_kw *
                      window_prices[static_cast<std::size_t>(k)];
      } else if (app.flexibility == Flexibility::ShiftableUninterruptible) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0;
             s + static_cast<std::size_t>(app.duration_slots) <=
             window_prices.size();
             ++s) {
          double sum = 0.0;
          for (int k = 0; k < app.duration_slots; ++k)
            sum += window_prices[s + static_cast<std::size_t>(k)];
          best = std::min(best, sum);
        }
        expected += inst.grid.slot_hours * app.rating_kw * best;
      } else {
        for (int t : app.baseline_on_slots)
          expected +=
              inst.grid.slot_hours * app.rating_kw *
              inst.tariff.price_cents_per_kwh[static_cast<std::size_t>(t - 1)];
      }
    }
    CHECK(r.cost.total_cents == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("brute force respects the search cap") {
  Customer c = single(make_appliance("a", 1.0, 10, 1, 40,
                                     Flexibility::ShiftableInterruptible,
                                     {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
  CHECK_THROWS_AS(brute_force_optimal(c, kGrid, flat_tariff(10.0),
                                      PenaltySchedule::uniform(0.0), 1000),
                  SearchCapError);
}

TEST_CASE("baseline infeasibility is rejected up front") {
  Customer c;
  c.id = "bad";
  c.max_demand_kw = 1.0;  // baseline peak is 2.0
  c.appliances = {make_appliance("a", 2.0, 1, 1, 4,
                                 Flexibility::ShiftableUninterruptible, {1})};
  CHECK_THROWS_AS(optimize_customer(c, kGrid, flat_tariff(1.0),
                                    PenaltySchedule::uniform(0.0)),
                  ValidationError);
}
