#include "dsm/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dsm/kernels.hpp"

namespace dsm {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

std::string appliance_ctx(const Appliance& a) {
  return "appliance '" + a.id + "': ";
}

bool is_contiguous(const std::vector<int>& slots) {
  for (std::size_t i = 1; i < slots.size(); ++i)
    if (slots[i] != slots[i - 1] + 1) return false;
  return true;
}

}  // namespace

void TimeGrid::validate() const {
  require(slots_per_day >= 1, "time grid: slots_per_day must be positive");
  require(slot_hours > 0.0, "time grid: slot_hours must be positive");
  require(std::fabs(slots_per_day * slot_hours - 24.0) < 1e-9,
          "time grid: slots_per_day * slot_hours must equal 24");
}

std::string to_string(Flexibility f) {
  switch (f) {
    case Flexibility::Fixed: return "fixed";
    case Flexibility::ShiftableUninterruptible: return "uninterruptible";
    case Flexibility::ShiftableInterruptible: return "interruptible";
  }
  return "?";
}

std::string to_string(Criticality c) {
  switch (c) {
    case Criticality::Low: return "low";
    case Criticality::Med: return "med";
    case Criticality::High: return "high";
  }
  return "?";
}

std::string to_string(CustomerKind k) {
  return k == CustomerKind::Residential ? "residential" : "commercial";
}

std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::MaxDemand: return "MaxDemand";
    case ViolationKind::Duration: return "Duration";
    case ViolationKind::Window: return "Window";
    case ViolationKind::Contiguity: return "Contiguity";
    case ViolationKind::FixedMoved: return "FixedMoved";
  }
  return "?";
}

Flexibility flexibility_from_string(const std::string& s) {
  if (s == "fixed") return Flexibility::Fixed;
  if (s == "uninterruptible") return Flexibility::ShiftableUninterruptible;
  if (s == "interruptible") return Flexibility::ShiftableInterruptible;
  throw ValidationError("unknown flexibility '" + s + "'");
}

Criticality criticality_from_string(const std::string& s) {
  if (s == "low") return Criticality::Low;
  if (s == "med") return Criticality::Med;
  if (s == "high") return Criticality::High;
  throw ValidationError("unknown criticality '" + s + "'");
}

CustomerKind customer_kind_from_string(const std::string& s) {
  if (s == "residential") return CustomerKind::Residential;
  if (s == "commercial") return CustomerKind::Commercial;
  throw ValidationError("unknown customer kind '" + s + "'");
}

void Appliance::validate(const TimeGrid& grid) const {
  const std::string ctx = appliance_ctx(*this);
  const int T = grid.slots_per_day;
  require(!id.empty(), "appliance with empty id");
  require(rating_kw > 0.0, ctx + "rating_kw must be positive");
  require(window_start >= 1 && window_start <= window_end && window_end <= T,
          ctx + "window must satisfy 1 <= start <= end <= T");
  const int width = window_end - window_start + 1;
  require(duration_slots >= 1 && duration_slots <= width,
          ctx + "duration_slots must lie in [1, window width]");
  require(static_cast<int>(baseline_on_slots.size()) == duration_slots,
          ctx + "baseline_on_slots length must equal duration_slots");
  for (std::size_t i = 0; i < baseline_on_slots.size(); ++i) {
    int s = baseline_on_slots[i];
    require(s >= window_start && s <= window_end,
            ctx + "baseline slot " + std::to_string(s) + " outside window");
    if (i > 0)
      require(s > baseline_on_slots[i - 1],
              ctx + "baseline_on_slots must be strictly increasing");
  }
  if (flexibility != Flexibility::ShiftableInterruptible)
    require(is_contiguous(baseline_on_slots),
            ctx + "baseline must be contiguous for " + to_string(flexibility) +
                " appliances");
}

void Tariff::validate(const TimeGrid& grid) const {
  require(static_cast<int>(price_cents_per_kwh.size()) == grid.slots_per_day,
          "tariff length must equal slots_per_day");
  for (double p : price_cents_per_kwh)
    require(p >= 0.0, "tariff prices must be nonnegative");
}

double PenaltySchedule::price_for(Criticality c) const {
  switch (c) {
    case Criticality::Low: return low;
    case Criticality::Med: return med;
    case Criticality::High: return high;
  }
  return 0.0;
}

PenaltySchedule PenaltySchedule::uniform(double cents_per_kwh) {
  return PenaltySchedule{cents_per_kwh, cents_per_kwh, cents_per_kwh};
}

void PenaltySchedule::validate() const {
  require(low >= 0.0 && med >= 0.0 && high >= 0.0,
          "penalty prices must be nonnegative");
}

void PvProfile::validate(const TimeGrid& grid) const {
  require(static_cast<int>(generation_kw.size()) == grid.slots_per_day,
          "pv profile length must equal slots_per_day");
  require(scale >= 0.0, "pv scale must be nonnegative");
  for (double g : generation_kw)
    require(g >= 0.0, "pv generation must be nonnegative");
}

double Customer::pv_at(int t) const {
  if (!has_pv || !pv.has_value()) return 0.0;
  return pv->scale * pv->generation_kw[static_cast<std::size_t>(t - 1)];
}

void Customer::validate(const TimeGrid& grid) const {
  require(!id.empty(), "customer with empty id");
  for (const Appliance& a : appliances) {
    try {
      a.validate(grid);
    } catch (const ValidationError& e) {
      throw ValidationError("customer '" + id + "': " + e.what());
    }
  }
  if (has_pv) {
    require(pv.has_value(), "customer '" + id + "': has_pv set but no profile");
    pv->validate(grid);
  }
  // the baseline itself must respect the demand cap
  Schedule base = Schedule::baseline_of(*this, grid);
  for (int t = 1; t <= grid.slots_per_day; ++t) {
    double g = gross_load(base, *this, t);
    require(g <= max_demand_kw + kDemandTolKw,
            "customer '" + id + "': baseline gross load " + std::to_string(g) +
                " kW exceeds max demand at slot " + std::to_string(t));
  }
}

Schedule Schedule::baseline_of(const Customer& customer, const TimeGrid& grid) {
  Schedule s;
  s.on.assign(customer.appliances.size(),
              std::vector<std::uint8_t>(grid.slots_per_day, 0));
  for (std::size_t a = 0; a < customer.appliances.size(); ++a)
    for (int t : customer.appliances[a].baseline_on_slots)
      s.on[a][static_cast<std::size_t>(t - 1)] = 1;
  return s;
}

namespace {

void check_dimensions(const Schedule& schedule, const Customer& customer) {
  if (schedule.rows() != static_cast<int>(customer.appliances.size())) {
    std::ostringstream oss;
    oss << "schedule has " << schedule.rows() << " rows but customer '"
        << customer.id << "' has " << customer.appliances.size()
        << " appliances";
    throw std::invalid_argument(oss.str());
  }
}

void check_slot(const Schedule& schedule, int t) {
  if (t < 1 || t > schedule.slots())
    throw std::out_of_range("slot index " + std::to_string(t) +
                            " outside 1.." + std::to_string(schedule.slots()));
}

}  // namespace

double gross_load(const Schedule& schedule, const Customer& customer, int t) {
  check_dimensions(schedule, customer);
  if (schedule.rows() == 0) return 0.0;  // empty sum; no columns to bound t
  check_slot(schedule, t);
  double total = 0.0;
  for (int a = 0; a < schedule.rows(); ++a)
    if (schedule.is_on(a, t)) total += customer.appliances[a].rating_kw;
  return total;
}

double net_load(const Schedule& schedule, const Customer& customer, int t) {
  double g = gross_load(schedule, customer, t) - customer.pv_at(t);
  return g > 0.0 ? g : 0.0;
}

double pv_surplus(const Schedule& schedule, const Customer& customer, int t) {
  double s = customer.pv_at(t) - gross_load(schedule, customer, t);
  return s > 0.0 ? s : 0.0;
}

std::vector<double> gross_profile(const Schedule& schedule,
                                  const Customer& customer) {
  check_dimensions(schedule, customer);
  std::vector<double> profile(schedule.slots(), 0.0);
  for (int a = 0; a < schedule.rows(); ++a) {
    const double r = customer.appliances[static_cast<std::size_t>(a)].rating_kw;
    const auto& row = schedule.on[static_cast<std::size_t>(a)];
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i]) profile[i] += r;
  }
  return profile;
}

std::vector<double> pv_profile_of(const Customer& customer, int slots) {
  std::vector<double> pv(static_cast<std::size_t>(slots), 0.0);
  for (int t = 1; t <= slots; ++t)
    pv[static_cast<std::size_t>(t - 1)] = customer.pv_at(t);
  return pv;
}

void net_and_surplus_profiles(const Schedule& schedule,
                              const Customer& customer,
                              std::vector<double>& net,
                              std::vector<double>& surplus) {
  std::vector<double> gross = gross_profile(schedule, customer);
  std::vector<double> pv = pv_profile_of(customer, schedule.slots());
  net.resize(gross.size());
  surplus.resize(gross.size());
  kernels::net_and_surplus(gross.data(), pv.data(), net.data(), surplus.data(),
                           gross.size());
}

std::vector<Violation> check_feasibility(const Schedule& schedule,
                                         const Customer& customer) {
  check_dimensions(schedule, customer);
  std::vector<Violation> violations;
  const int T = schedule.slots();

  for (int a = 0; a < schedule.rows(); ++a) {
    const Appliance& app = customer.appliances[static_cast<std::size_t>(a)];
    const auto& row = schedule.on[static_cast<std::size_t>(a)];

    int count = 0;
    int first_on = 0, last_on = 0;
    for (int t = 1; t <= T; ++t) {
      if (!row[static_cast<std::size_t>(t - 1)]) continue;
      ++count;
      if (first_on == 0) first_on = t;
      last_on = t;
      if (t < app.window_start || t > app.window_end)
        violations.push_back({ViolationKind::Window, app.id, t,
                              "on outside window [" +
                                  std::to_string(app.window_start) + "," +
                                  std::to_string(app.window_end) + "]"});
    }

    if (count != app.duration_slots)
      violations.push_back({ViolationKind::Duration, app.id, 0,
                            "row sum " + std::to_string(count) +
                                " != duration " +
                                std::to_string(app.duration_slots)});

    if (app.flexibility != Flexibility::ShiftableInterruptible && count > 0 &&
        last_on - first_on + 1 != count)
      violations.push_back({ViolationKind::Contiguity, app.id, 0,
                            "on-slots are not one contiguous block"});

    if (app.flexibility == Flexibility::Fixed) {
      std::vector<std::uint8_t> base(static_cast<std::size_t>(T), 0);
      for (int t : app.baseline_on_slots)
        base[static_cast<std::size_t>(t - 1)] = 1;
      if (base != row)
        violations.push_back({ViolationKind::FixedMoved, app.id, 0,
                              "fixed appliance differs from baseline"});
    }
  }

  for (int t = 1; t <= T; ++t) {
    double g = gross_load(schedule, customer, t);
    if (g > customer.max_demand_kw + kDemandTolKw) {
      std::ostringstream oss;
      oss << "gross " << g << " kW > max demand " << customer.max_demand_kw
          << " kW";
      violations.push_back({ViolationKind::MaxDemand, "", t, oss.str()});
    }
  }

  return violations;
}

std::vector<int> on_slot_vector(const Schedule& schedule,
                                const Customer& customer,
                                int appliance_index) {
  check_dimensions(schedule, customer);
  const Appliance& app =
      customer.appliances[static_cast<std::size_t>(appliance_index)];
  std::vector<int> slots;
  const auto& row = schedule.on[static_cast<std::size_t>(appliance_index)];
  for (std::size_t i = 0; i < row.size(); ++i)
    if (row[i]) slots.push_back(static_cast<int>(i) + 1);
  if (static_cast<int>(slots.size()) != app.duration_slots)
    throw std::invalid_argument(
        "appliance '" + app.id + "': row sum " +
        std::to_string(slots.size()) + " != duration " +
        std::to_string(app.duration_slots));
  return slots;
}

}  // namespace dsm
