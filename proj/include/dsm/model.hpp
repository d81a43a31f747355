#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Domain types for the day-ahead scheduling problem: appliances with
// operating windows, binary on/off schedules over T slots, tariffs, rooftop
// PV profiles, and customers attached to feeder buses. All types are plain
// values; every operation is a pure function.

namespace dsm {

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what)
      : std::runtime_error(what) {}
};

// The daily horizon. Slots are 1-based; slot t covers clock time
// [(t-1)*slot_hours, t*slot_hours). slots_per_day * slot_hours must be 24 h.
struct TimeGrid {
  int slots_per_day = 48;
  double slot_hours = 0.5;

  void validate() const;
  // hour of the middle of slot t, for profile synthesis and reporting
  double slot_mid_hour(int t) const { return (t - 0.5) * slot_hours; }
};

enum class Flexibility : std::uint8_t {
  Fixed,                    // base load, schedule immovable
  ShiftableUninterruptible, // one contiguous block anywhere in the window
  ShiftableInterruptible,   // any D slots in the window
};

enum class Criticality : std::uint8_t { Low, Med, High };

enum class CustomerKind : std::uint8_t { Residential, Commercial };

std::string to_string(Flexibility f);
std::string to_string(Criticality c);
std::string to_string(CustomerKind k);
Flexibility flexibility_from_string(const std::string& s);
Criticality criticality_from_string(const std::string& s);
CustomerKind customer_kind_from_string(const std::string& s);

// One controllable or fixed load. The window [window_start, window_end]
// bounds every slot in which the appliance may be ON; duration_slots is the
// number of on-slots requested; baseline_on_slots is the customer's original
// (pre-optimization) placement.
struct Appliance {
  std::string id;
  double rating_kw = 0.0;
  int duration_slots = 0;
  int window_start = 1;
  int window_end = 1;
  Flexibility flexibility = Flexibility::ShiftableInterruptible;
  Criticality criticality = Criticality::Low;
  std::vector<int> baseline_on_slots;

  void validate(const TimeGrid& grid) const;
};

// Time-of-use price per slot, cents per kWh.
struct Tariff {
  std::vector<double> price_cents_per_kwh;

  void validate(const TimeGrid& grid) const;
};

// Penalty price per unit of shift "energy" r_a * dT_a, by criticality tier.
struct PenaltySchedule {
  double low = 0.0;
  double med = 0.0;
  double high = 0.0;

  double price_for(Criticality c) const;
  static PenaltySchedule uniform(double cents_per_kwh);
  void validate() const;
};

// Rooftop PV generation per slot in kW; scale supports penetration studies.
struct PvProfile {
  std::vector<double> generation_kw;
  double scale = 1.0;

  void validate(const TimeGrid& grid) const;
};

struct Customer {
  std::string id;
  CustomerKind kind = CustomerKind::Residential;
  int bus = 0;
  std::vector<Appliance> appliances;
  double max_demand_kw = 0.0;
  bool has_pv = false;
  std::optional<PvProfile> pv;

  // effective PV output at slot t (1-based); 0 unless has_pv
  double pv_at(int t) const;
  void validate(const TimeGrid& grid) const;
};

// Binary on/off matrix for one customer: rows follow customer.appliances,
// columns are slots 1..T (stored 0-based).
struct Schedule {
  std::vector<std::vector<std::uint8_t>> on;

  int rows() const { return static_cast<int>(on.size()); }
  int slots() const { return on.empty() ? 0 : static_cast<int>(on[0].size()); }
  bool is_on(int appliance_index, int t) const {
    return on[appliance_index][t - 1] != 0;
  }
  static Schedule baseline_of(const Customer& customer, const TimeGrid& grid);
  bool operator==(const Schedule& other) const { return on == other.on; }
};

enum class ViolationKind : std::uint8_t {
  MaxDemand,
  Duration,
  Window,
  Contiguity,
  FixedMoved,
};

std::string to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string appliance_id;  // empty for the cross-appliance MaxDemand check
  int slot = 0;              // 0 when the violation is not slot-specific
  std::string detail;
};

// Aggregate appliance power sum_a r_a * on[a][t] at slot t, in kW.
double gross_load(const Schedule& schedule, const Customer& customer, int t);

// max(gross - pv, 0): the billable net load of Eq.-(4) form.
double net_load(const Schedule& schedule, const Customer& customer, int t);

// max(pv - gross, 0): locally unconsumed PV, exported to the feeder.
double pv_surplus(const Schedule& schedule, const Customer& customer, int t);

// Per-slot vectors over the whole day (same definitions as above).
std::vector<double> gross_profile(const Schedule& schedule,
                                  const Customer& customer);
std::vector<double> pv_profile_of(const Customer& customer, int slots);
void net_and_surplus_profiles(const Schedule& schedule,
                              const Customer& customer,
                              std::vector<double>& net,
                              std::vector<double>& surplus);

// Checks every schedule constraint; an empty result means feasible.
std::vector<Violation> check_feasibility(const Schedule& schedule,
                                         const Customer& customer);

// Strictly increasing slots where row `appliance_index` is on. Throws if the
// row sum differs from the appliance's duration.
std::vector<int> on_slot_vector(const Schedule& schedule,
                                const Customer& customer, int appliance_index);

// Tolerance for max-demand comparisons; keeps float dust from flagging
// placements that are tight by construction.
inline constexpr double kDemandTolKw = 1e-9;

}  // namespace dsm
