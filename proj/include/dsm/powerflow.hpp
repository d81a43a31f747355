#pragma once

#include <complex>
#include <string>
#include <vector>

#include "dsm/model.hpp"

// Radial distribution feeder and per-slot AC load flow. The solver is a
// backward/forward sweep: current accumulation from the leaves to the slack
// bus, then voltage updates from the slack outward, iterated to a voltage
// tolerance. Signed bus injections carry PV surplus as exports, so reverse
// power flow and the associated voltage rise fall out of the same solve.

namespace dsm {

struct Branch {
  int from_bus = 0;
  int to_bus = 0;
  double resistance_ohm = 0.0;
  double reactance_ohm = 0.0;
};

class NonRadialError : public ValidationError {
 public:
  explicit NonRadialError(const std::string& what) : ValidationError(what) {}
};

// A tree of buses rooted at the slack bus. Construction validates radiality:
// exactly buses-1 branches, connected, acyclic. Bus ids are arbitrary ints.
class FeederNetwork {
 public:
  FeederNetwork(std::vector<int> bus_ids, int slack_bus,
                std::vector<Branch> branches, double base_kv, double base_mva);

  int bus_count() const { return static_cast<int>(bus_ids_.size()); }
  int branch_count() const { return static_cast<int>(branches_.size()); }
  const std::vector<int>& bus_ids() const { return bus_ids_; }
  const std::vector<Branch>& branches() const { return branches_; }
  int slack_bus() const { return slack_bus_; }
  double base_kv() const { return base_kv_; }
  double base_mva() const { return base_mva_; }
  double base_impedance_ohm() const { return base_kv_ * base_kv_ / base_mva_; }
  double base_current_amp() const;

  bool has_bus(int bus_id) const;
  int index_of(int bus_id) const;  // throws on unknown bus

  // buses in breadth-first order from the slack; parents precede children
  const std::vector<int>& sweep_order() const { return sweep_order_; }
  // branch feeding bus index i (by branch array position), -1 for slack
  const std::vector<int>& feeding_branch() const { return feeding_branch_; }
  const std::vector<int>& parent_index() const { return parent_index_; }

 private:
  std::vector<int> bus_ids_;
  int slack_bus_;
  std::vector<Branch> branches_;
  double base_kv_;
  double base_mva_;
  std::vector<int> sweep_order_;
  std::vector<int> feeding_branch_;
  std::vector<int> parent_index_;
};

// Net complex power per bus for one slot, in kW / kVAr. Positive real power
// is consumption, negative is PV export.
struct SlotInjections {
  std::vector<double> p_kw;    // indexed like FeederNetwork bus order
  std::vector<double> q_kvar;
};

struct LoadFlowSolution {
  std::vector<double> bus_voltage_pu;     // magnitudes, network bus order
  std::vector<double> branch_current_amp;
  std::vector<double> branch_loss_kw;
  double total_loss_kw = 0.0;
  double slack_injection_kw = 0.0;  // real power sent from the substation
  bool converged = false;
  int iterations = 0;
};

class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

// Aggregates customer net loads and PV exports into per-bus injections at
// slot t. Consumption draws reactive power at the given power factor;
// exports are unity-power-factor.
SlotInjections build_injections(const FeederNetwork& network,
                                const std::vector<Customer>& customers,
                                const std::vector<Schedule>& schedules, int t,
                                double power_factor = 0.95);

// One backward/forward sweep solve. Non-convergence is reported in the
// returned flags, never silently.
LoadFlowSolution solve_slot(const FeederNetwork& network,
                            const SlotInjections& injections,
                            double tol_pu = 1e-8, int max_iterations = 100);

// All T slots of a day. Throws ConvergenceError naming the first slot that
// fails to converge.
std::vector<LoadFlowSolution> solve_day(
    const FeederNetwork& network, const std::vector<Customer>& customers,
    const std::vector<Schedule>& schedules, const TimeGrid& grid,
    double power_factor = 0.95, double tol_pu = 1e-8,
    int max_iterations = 100);

double daily_loss_kwh(const std::vector<LoadFlowSolution>& day,
                      const TimeGrid& grid);

}  // namespace dsm
