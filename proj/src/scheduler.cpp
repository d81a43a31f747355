#include "dsm/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dsm/kernels.hpp"

namespace dsm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> tariff_vector(const Tariff& tariff) {
  return tariff.price_cents_per_kwh;
}

int abs_shift(const std::vector<int>& a, const std::vector<int>& b) {
  int total = 0;
  for (std::size_t k = 0; k < a.size(); ++k) total += std::abs(a[k] - b[k]);
  return total;
}

}  // namespace

double electricity_cost(const Schedule& schedule, const Customer& customer,
                        const TimeGrid& grid, const Tariff& tariff) {
  if (static_cast<int>(tariff.price_cents_per_kwh.size()) !=
      grid.slots_per_day)
    throw std::invalid_argument("tariff length != slots_per_day");
  std::vector<double> gross = gross_profile(schedule, customer);
  std::vector<double> pv = pv_profile_of(customer, schedule.slots());
  return grid.slot_hours *
         kernels::clamped_energy_cost(gross.data(), pv.data(),
                                      tariff.price_cents_per_kwh.data(),
                                      gross.size());
}

int shift_duration(const Appliance& appliance,
                   const std::vector<int>& new_on_slots) {
  if (new_on_slots.size() != appliance.baseline_on_slots.size())
    throw std::invalid_argument("appliance '" + appliance.id +
                                "': new on-slot list length != duration");
  return abs_shift(new_on_slots, appliance.baseline_on_slots);
}

double penalty_cost(const Schedule& schedule, const Customer& customer,
                    const TimeGrid& grid, const PenaltySchedule& penalties) {
  double total = 0.0;
  for (std::size_t a = 0; a < customer.appliances.size(); ++a) {
    const Appliance& app = customer.appliances[a];
    std::vector<int> on = on_slot_vector(schedule, customer,
                                         static_cast<int>(a));
    int dt = shift_duration(app, on);
    total += penalties.price_for(app.criticality) * app.rating_kw * dt;
  }
  return grid.slot_hours * total;
}

CostBreakdown total_cost(const Schedule& schedule, const Customer& customer,
                         const TimeGrid& grid, const Tariff& tariff,
                         const PenaltySchedule& penalties) {
  CostBreakdown out;
  out.electricity_cents = electricity_cost(schedule, customer, grid, tariff);
  double penalty = 0.0;
  for (std::size_t a = 0; a < customer.appliances.size(); ++a) {
    const Appliance& app = customer.appliances[a];
    int dt = shift_duration(
        app, on_slot_vector(schedule, customer, static_cast<int>(a)));
    out.per_appliance_shift_slots[app.id] = dt;
    penalty += penalties.price_for(app.criticality) * app.rating_kw * dt;
  }
  out.penalty_cents = grid.slot_hours * penalty;
  out.total_cents = out.electricity_cents + out.penalty_cents;
  return out;
}

namespace {

// Placement subproblem for one appliance against the others' frozen gross
// load. Marginal electricity cost per slot comes from the clamp difference;
// the penalty term pairs candidate slots with baseline slots by rank.
struct Subproblem {
  const Appliance& app;
  const std::vector<double>& marginal_cents;  // h * price * clamp difference
  const std::vector<std::uint8_t>& slot_ok;   // MD feasibility per slot, 1-based offset 0
  double penalty_per_slot_cents;              // h * pi_p * r

  double placement_cost(const std::vector<int>& slots) const {
    double c = 0.0;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      c += marginal_cents[static_cast<std::size_t>(slots[k] - 1)];
      c += penalty_per_slot_cents *
           std::abs(slots[k] - app.baseline_on_slots[k]);
    }
    return c;
  }
};

// Best contiguous block: enumerate starts ascending, strict improvement only,
// so the earliest start wins ties.
bool best_uninterruptible(const Subproblem& sub, std::vector<int>& best_slots,
                          double& best_cost) {
  const int s = sub.app.window_start, f = sub.app.window_end;
  const int D = sub.app.duration_slots;
  bool found = false;
  std::vector<int> slots(static_cast<std::size_t>(D));
  for (int start = s; start <= f - D + 1; ++start) {
    bool ok = true;
    for (int k = 0; k < D && ok; ++k)
      ok = sub.slot_ok[static_cast<std::size_t>(start + k - 1)] != 0;
    if (!ok) continue;
    for (int k = 0; k < D; ++k) slots[static_cast<std::size_t>(k)] = start + k;
    double c = sub.placement_cost(slots);
    if (!found || c < best_cost) {
      found = true;
      best_cost = c;
      best_slots = slots;
    }
  }
  return found;
}

// Best D-subset of the window via a suffix DP over (window position, rank).
// Ties resolve toward taking the earlier slot, which yields the
// lexicographically smallest on-slot list among optima.
bool best_interruptible(const Subproblem& sub, std::vector<int>& best_slots,
                        double& best_cost) {
  const int s = sub.app.window_start, f = sub.app.window_end;
  const int W = f - s + 1;
  const int D = sub.app.duration_slots;

  auto cost_at = [&](int pos, int rank) {
    int slot = s + pos;
    return sub.marginal_cents[static_cast<std::size_t>(slot - 1)] +
           sub.penalty_per_slot_cents *
               std::abs(slot - sub.app.baseline_on_slots[
                                   static_cast<std::size_t>(rank)]);
  };
  auto ok_at = [&](int pos) {
    return sub.slot_ok[static_cast<std::size_t>(s + pos - 1)] != 0;
  };

  // g[k][pos]: min cost of placing ranks k..D-1 using window positions >= pos
  std::vector<std::vector<double>> g(
      static_cast<std::size_t>(D + 1),
      std::vector<double>(static_cast<std::size_t>(W + 1), kInf));
  for (int pos = 0; pos <= W; ++pos)
    g[static_cast<std::size_t>(D)][static_cast<std::size_t>(pos)] = 0.0;
  for (int k = D - 1; k >= 0; --k) {
    for (int pos = W - 1; pos >= 0; --pos) {
      double skip = g[static_cast<std::size_t>(k)]
                     [static_cast<std::size_t>(pos + 1)];
      double take = kInf;
      if (ok_at(pos)) {
        double rest = g[static_cast<std::size_t>(k + 1)]
                       [static_cast<std::size_t>(pos + 1)];
        if (rest < kInf) take = cost_at(pos, k) + rest;
      }
      g[static_cast<std::size_t>(k)][static_cast<std::size_t>(pos)] =
          std::min(skip, take);
    }
  }
  if (!(g[0][0] < kInf)) return false;

  best_cost = g[0][0];
  best_slots.clear();
  int k = 0;
  for (int pos = 0; pos < W && k < D; ++pos) {
    if (!ok_at(pos)) continue;
    double rest = g[static_cast<std::size_t>(k + 1)]
                   [static_cast<std::size_t>(pos + 1)];
    if (rest < kInf &&
        cost_at(pos, k) + rest <=
            g[static_cast<std::size_t>(k)][static_cast<std::size_t>(pos + 1)]) {
      best_slots.push_back(s + pos);
      ++k;
    }
  }
  return true;
}

void apply_slots(Schedule& schedule, int row, const std::vector<int>& slots) {
  auto& r = schedule.on[static_cast<std::size_t>(row)];
  std::fill(r.begin(), r.end(), 0);
  for (int t : slots) r[static_cast<std::size_t>(t - 1)] = 1;
}

}  // namespace

OptimizeResult optimize_customer(const Customer& customer,
                                 const TimeGrid& grid, const Tariff& tariff,
                                 const PenaltySchedule& penalties,
                                 const OptimizerConfig& config) {
  if (config.max_passes < 1 || config.improvement_epsilon <= 0.0)
    throw std::invalid_argument("optimizer config: max_passes >= 1 and "
                                "improvement_epsilon > 0 required");
  const int T = grid.slots_per_day;
  Schedule current = Schedule::baseline_of(customer, grid);
  {
    std::vector<Violation> v = check_feasibility(current, customer);
    if (!v.empty()) {
      std::ostringstream oss;
      oss << "customer '" << customer.id << "': baseline infeasible ("
          << to_string(v.front().kind) << " " << v.front().detail << ")";
      throw ValidationError(oss.str());
    }
  }

  // visit order: descending rating, ties by id ascending; fixed rows skipped
  std::vector<int> order;
  for (std::size_t a = 0; a < customer.appliances.size(); ++a)
    if (customer.appliances[a].flexibility != Flexibility::Fixed)
      order.push_back(static_cast<int>(a));
  std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    const Appliance& x = customer.appliances[static_cast<std::size_t>(lhs)];
    const Appliance& y = customer.appliances[static_cast<std::size_t>(rhs)];
    if (x.rating_kw != y.rating_kw) return x.rating_kw > y.rating_kw;
    return x.id < y.id;
  });

  const std::vector<double> price = tariff_vector(tariff);
  const std::vector<double> pv = pv_profile_of(customer, T);
  std::vector<double> gross = gross_profile(current, customer);

  OptimizeResult result;
  CostBreakdown base_cost =
      total_cost(current, customer, grid, tariff, penalties);
  result.objective_trace.push_back(base_cost.total_cents);

  std::vector<double> others(static_cast<std::size_t>(T));
  std::vector<double> marginal(static_cast<std::size_t>(T));
  std::vector<std::uint8_t> slot_ok(static_cast<std::size_t>(T));

  double prev_total = base_cost.total_cents;
  int pass = 0;
  for (; pass < config.max_passes; ++pass) {
    for (int a : order) {
      const Appliance& app = customer.appliances[static_cast<std::size_t>(a)];
      const auto& row = current.on[static_cast<std::size_t>(a)];

      for (int i = 0; i < T; ++i) {
        others[static_cast<std::size_t>(i)] =
            gross[static_cast<std::size_t>(i)] -
            (row[static_cast<std::size_t>(i)] ? app.rating_kw : 0.0);
        slot_ok[static_cast<std::size_t>(i)] =
            others[static_cast<std::size_t>(i)] + app.rating_kw <=
                    customer.max_demand_kw + kDemandTolKw
                ? 1
                : 0;
      }
      kernels::placement_marginals(others.data(), pv.data(), price.data(),
                                   app.rating_kw, marginal.data(),
                                   static_cast<std::size_t>(T));
      for (double& m : marginal) m *= grid.slot_hours;

      Subproblem sub{app, marginal, slot_ok,
                     grid.slot_hours *
                         penalties.price_for(app.criticality) *
                         app.rating_kw};
      std::vector<int> slots;
      double cost = kInf;
      bool found = app.flexibility == Flexibility::ShiftableUninterruptible
                       ? best_uninterruptible(sub, slots, cost)
                       : best_interruptible(sub, slots, cost);
      if (!found)
        throw ValidationError("customer '" + customer.id + "': appliance '" +
                              app.id + "' has no feasible placement");

      apply_slots(current, a, slots);
      for (int i = 0; i < T; ++i)
        gross[static_cast<std::size_t>(i)] =
            others[static_cast<std::size_t>(i)];
      for (int t : slots)
        gross[static_cast<std::size_t>(t - 1)] += app.rating_kw;
    }

    CostBreakdown cb = total_cost(current, customer, grid, tariff, penalties);
    result.objective_trace.push_back(cb.total_cents);
    double improvement = prev_total - cb.total_cents;
    prev_total = cb.total_cents;
    if (improvement < config.improvement_epsilon) {
      ++pass;
      break;
    }
  }

  result.schedule = std::move(current);
  result.cost = total_cost(result.schedule, customer, grid, tariff, penalties);
  result.passes = pass;
  return result;
}

long long placement_count(const Appliance& appliance) {
  const int width = appliance.window_end - appliance.window_start + 1;
  const int D = appliance.duration_slots;
  switch (appliance.flexibility) {
    case Flexibility::Fixed:
      return 1;
    case Flexibility::ShiftableUninterruptible:
      return width - D + 1;
    case Flexibility::ShiftableInterruptible: {
      // C(width, D), saturating well above any practical cap
      long long c = 1;
      for (int k = 1; k <= D; ++k) {
        c = c * (width - D + k) / k;
        if (c > (1LL << 60)) return 1LL << 60;
      }
      return c;
    }
  }
  return 1;
}

namespace {

// All feasible on-slot lists of one appliance, in lexicographic order.
std::vector<std::vector<int>> enumerate_placements(const Appliance& app) {
  std::vector<std::vector<int>> out;
  const int s = app.window_start, f = app.window_end, D = app.duration_slots;
  if (app.flexibility == Flexibility::Fixed) {
    out.push_back(app.baseline_on_slots);
    return out;
  }
  if (app.flexibility == Flexibility::ShiftableUninterruptible) {
    for (int start = s; start <= f - D + 1; ++start) {
      std::vector<int> slots(static_cast<std::size_t>(D));
      std::iota(slots.begin(), slots.end(), start);
      out.push_back(std::move(slots));
    }
    return out;
  }
  // interruptible: D-combinations of [s..f]
  std::vector<int> idx(static_cast<std::size_t>(D));
  std::iota(idx.begin(), idx.end(), s);
  while (true) {
    out.push_back(idx);
    int k = D - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == f - (D - 1 - k)) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < D; ++j)
      idx[static_cast<std::size_t>(j)] =
          idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

}  // namespace

OptimizeResult brute_force_optimal(const Customer& customer,
                                   const TimeGrid& grid, const Tariff& tariff,
                                   const PenaltySchedule& penalties,
                                   long long search_cap) {
  const int T = grid.slots_per_day;
  const std::size_t A = customer.appliances.size();

  long long combos = 1;
  for (const Appliance& app : customer.appliances) {
    combos *= placement_count(app);
    if (combos > search_cap) {
      std::ostringstream oss;
      oss << "brute force: placement space exceeds cap " << search_cap
          << " for customer '" << customer.id << "'";
      throw SearchCapError(oss.str());
    }
  }

  std::vector<std::vector<std::vector<int>>> placements;
  std::vector<std::vector<double>> placement_penalty_cents;
  placements.reserve(A);
  for (const Appliance& app : customer.appliances) {
    placements.push_back(enumerate_placements(app));
    std::vector<double> pens;
    pens.reserve(placements.back().size());
    const double coef = grid.slot_hours *
                        penalties.price_for(app.criticality) * app.rating_kw;
    for (const auto& slots : placements.back())
      pens.push_back(coef * abs_shift(slots, app.baseline_on_slots));
    placement_penalty_cents.push_back(std::move(pens));
  }

  const std::vector<double> pv = pv_profile_of(customer, T);
  const double* price = tariff.price_cents_per_kwh.data();
  std::vector<double> gross(static_cast<std::size_t>(T), 0.0);

  std::vector<std::size_t> choice(A, 0);
  std::vector<std::size_t> best_choice;
  double best_total = kInf;

  // depth-first over appliances in row order; enumeration is lexicographic
  // and acceptance strict, so the first optimum found is the lex-smallest.
  auto descend = [&](auto&& self, std::size_t a, double penalty_acc) -> void {
    if (a == A) {
      for (int t = 0; t < T; ++t)
        if (gross[static_cast<std::size_t>(t)] >
            customer.max_demand_kw + kDemandTolKw)
          return;
      double total = penalty_acc +
                     grid.slot_hours *
                         kernels::clamped_energy_cost(
                             gross.data(), pv.data(), price,
                             static_cast<std::size_t>(T));
      if (total < best_total) {
        best_total = total;
        best_choice = choice;
      }
      return;
    }
    const double r = customer.appliances[a].rating_kw;
    for (std::size_t p = 0; p < placements[a].size(); ++p) {
      choice[a] = p;
      for (int t : placements[a][p])
        gross[static_cast<std::size_t>(t - 1)] += r;
      self(self, a + 1, penalty_acc + placement_penalty_cents[a][p]);
      for (int t : placements[a][p])
        gross[static_cast<std::size_t>(t - 1)] -= r;
    }
  };
  descend(descend, 0, 0.0);

  if (best_choice.empty() && best_total == kInf)
    throw ValidationError("brute force: no feasible joint schedule for '" +
                          customer.id + "'");

  Schedule best;
  best.on.assign(A, std::vector<std::uint8_t>(static_cast<std::size_t>(T), 0));
  for (std::size_t a = 0; a < A; ++a)
    apply_slots(best, static_cast<int>(a), placements[a][best_choice[a]]);

  OptimizeResult result;
  result.schedule = std::move(best);
  result.cost = total_cost(result.schedule, customer, grid, tariff, penalties);
  result.passes = 0;
  Schedule baseline = Schedule::baseline_of(customer, grid);
  result.objective_trace = {
      total_cost(baseline, customer, grid, tariff, penalties).total_cents,
      result.cost.total_cents};
  return result;
}

}  // namespace dsm
