#include "dsm/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "dsm/kernels.hpp"

namespace dsm {

namespace {

std::unordered_map<int, int> index_map(const std::vector<int>& ids) {
  std::unordered_map<int, int> m;
  for (std::size_t i = 0; i < ids.size(); ++i)
    m.emplace(ids[i], static_cast<int>(i));
  return m;
}

}  // namespace

FeederNetwork::FeederNetwork(std::vector<int> bus_ids, int slack_bus,
                             std::vector<Branch> branches, double base_kv,
                             double base_mva)
    : bus_ids_(std::move(bus_ids)),
      slack_bus_(slack_bus),
      branches_(std::move(branches)),
      base_kv_(base_kv),
      base_mva_(base_mva) {
  if (base_kv_ <= 0.0 || base_mva_ <= 0.0)
    throw ValidationError("network: base_kv and base_mva must be positive");
  if (bus_ids_.empty()) throw ValidationError("network: no buses");
  std::unordered_map<int, int> idx = index_map(bus_ids_);
  if (idx.size() != bus_ids_.size())
    throw ValidationError("network: duplicate bus ids");
  if (!idx.count(slack_bus_))
    throw NonRadialError("network: slack bus " + std::to_string(slack_bus_) +
                         " not in bus list");
  if (branches_.size() != bus_ids_.size() - 1) {
    std::ostringstream oss;
    oss << "network: " << bus_ids_.size() << " buses need exactly "
        << bus_ids_.size() - 1 << " branches for a radial tree, got "
        << branches_.size();
    throw NonRadialError(oss.str());
  }
  for (const Branch& b : branches_) {
    if (!idx.count(b.from_bus) || !idx.count(b.to_bus))
      throw ValidationError("network: branch references unknown bus " +
                            std::to_string(idx.count(b.from_bus) ? b.to_bus
                                                                 : b.from_bus));
    if (b.resistance_ohm < 0.0 || b.reactance_ohm < 0.0)
      throw ValidationError("network: branch impedances must be nonnegative");
  }

  // breadth-first walk from the slack; every bus must be reached exactly once
  const int n = bus_count();
  std::vector<std::vector<std::pair<int, int>>> adjacency(
      static_cast<std::size_t>(n));  // (neighbor index, branch index)
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    int u = idx[branches_[b].from_bus];
    int v = idx[branches_[b].to_bus];
    adjacency[static_cast<std::size_t>(u)].push_back(
        {v, static_cast<int>(b)});
    adjacency[static_cast<std::size_t>(v)].push_back(
        {u, static_cast<int>(b)});
  }
  parent_index_.assign(static_cast<std::size_t>(n), -1);
  feeding_branch_.assign(static_cast<std::size_t>(n), -1);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  sweep_order_.clear();
  sweep_order_.push_back(idx[slack_bus_]);
  seen[static_cast<std::size_t>(idx[slack_bus_])] = 1;
  for (std::size_t head = 0; head < sweep_order_.size(); ++head) {
    int u = sweep_order_[head];
    for (auto [v, b] : adjacency[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(v)]) {
        if (v != parent_index_[static_cast<std::size_t>(u)])
          throw NonRadialError("network: cycle detected through bus " +
                               std::to_string(bus_ids_[
                                   static_cast<std::size_t>(v)]));
        continue;
      }
      seen[static_cast<std::size_t>(v)] = 1;
      parent_index_[static_cast<std::size_t>(v)] = u;
      feeding_branch_[static_cast<std::size_t>(v)] = b;
      sweep_order_.push_back(v);
    }
  }
  if (static_cast<int>(sweep_order_.size()) != n) {
    std::ostringstream oss;
    oss << "network: " << n - static_cast<int>(sweep_order_.size())
        << " bus(es) unreachable from the slack";
    throw NonRadialError(oss.str());
  }
}

double FeederNetwork::base_current_amp() const {
  // three-phase bases: I = S / (sqrt(3) * V_LL)
  return base_mva_ * 1000.0 / (std::sqrt(3.0) * base_kv_);
}

bool FeederNetwork::has_bus(int bus_id) const {
  return std::find(bus_ids_.begin(), bus_ids_.end(), bus_id) != bus_ids_.end();
}

int FeederNetwork::index_of(int bus_id) const {
  auto it = std::find(bus_ids_.begin(), bus_ids_.end(), bus_id);
  if (it == bus_ids_.end())
    throw ValidationError("network: unknown bus " + std::to_string(bus_id));
  return static_cast<int>(it - bus_ids_.begin());
}

SlotInjections build_injections(const FeederNetwork& network,
                                const std::vector<Customer>& customers,
                                const std::vector<Schedule>& schedules, int t,
                                double power_factor) {
  if (customers.size() != schedules.size())
    throw std::invalid_argument("build_injections: customers and schedules "
                                "differ in length");
  if (power_factor <= 0.0 || power_factor > 1.0)
    throw std::invalid_argument("build_injections: power factor in (0, 1]");
  const double tan_phi =
      std::tan(std::acos(std::min(power_factor, 1.0)));

  SlotInjections inj;
  inj.p_kw.assign(static_cast<std::size_t>(network.bus_count()), 0.0);
  inj.q_kvar.assign(static_cast<std::size_t>(network.bus_count()), 0.0);
  for (std::size_t c = 0; c < customers.size(); ++c) {
    const Customer& cust = customers[c];
    const int bus = network.index_of(cust.bus);
    const double consumption = net_load(schedules[c], cust, t);
    const double exported = pv_surplus(schedules[c], cust, t);
    inj.p_kw[static_cast<std::size_t>(bus)] += consumption - exported;
    inj.q_kvar[static_cast<std::size_t>(bus)] += consumption * tan_phi;
  }
  return inj;
}

LoadFlowSolution solve_slot(const FeederNetwork& network,
                            const SlotInjections& injections, double tol_pu,
                            int max_iterations) {
  if (tol_pu <= 0.0 || max_iterations < 1)
    throw std::invalid_argument("solve_slot: tol > 0 and max_iterations >= 1 "
                                "required");
  const int n = network.bus_count();
  if (static_cast<int>(injections.p_kw.size()) != n ||
      static_cast<int>(injections.q_kvar.size()) != n)
    throw std::invalid_argument("solve_slot: injection size != bus count");

  using cplx = std::complex<double>;
  const double s_base_kw = network.base_mva() * 1000.0;
  const double z_base = network.base_impedance_ohm();

  std::vector<cplx> s_pu(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    s_pu[static_cast<std::size_t>(i)] =
        cplx(injections.p_kw[static_cast<std::size_t>(i)] / s_base_kw,
             injections.q_kvar[static_cast<std::size_t>(i)] / s_base_kw);

  std::vector<cplx> z_pu;
  z_pu.reserve(network.branches().size());
  for (const Branch& b : network.branches())
    z_pu.emplace_back(b.resistance_ohm / z_base, b.reactance_ohm / z_base);

  const auto& order = network.sweep_order();
  const auto& parent = network.parent_index();
  const auto& feed = network.feeding_branch();
  const int slack = order.front();

  std::vector<cplx> v(static_cast<std::size_t>(n), cplx(1.0, 0.0));
  std::vector<cplx> branch_current(network.branches().size());
  std::vector<double> v_mag(static_cast<std::size_t>(n), 1.0);

  bool converged = false;
  int iter = 0;
  std::vector<cplx> downstream(static_cast<std::size_t>(n));
  while (iter < max_iterations) {
    ++iter;

    // backward: accumulate bus injection currents toward the slack
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      downstream[ui] = (i == slack || s_pu[ui] == cplx(0.0, 0.0))
                           ? cplx(0.0, 0.0)
                           : std::conj(s_pu[ui] / v[ui]);
    }
    for (std::size_t k = order.size(); k-- > 1;) {
      int u = order[k];
      downstream[static_cast<std::size_t>(parent[
          static_cast<std::size_t>(u)])] +=
          downstream[static_cast<std::size_t>(u)];
    }
    // forward: update voltages from the slack outward
    double max_dv = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) {
      int u = order[k];
      const auto uu = static_cast<std::size_t>(u);
      const int b = feed[uu];
      branch_current[static_cast<std::size_t>(b)] = downstream[uu];
      v[uu] = v[static_cast<std::size_t>(parent[uu])] -
              z_pu[static_cast<std::size_t>(b)] * downstream[uu];
      double mag = std::abs(v[uu]);
      max_dv = std::max(max_dv, std::fabs(mag - v_mag[uu]));
      v_mag[uu] = mag;
    }
    if (max_dv < tol_pu) {
      converged = true;
      break;
    }
  }

  LoadFlowSolution sol;
  sol.converged = converged;
  sol.iterations = iter;
  sol.bus_voltage_pu = v_mag;
  sol.bus_voltage_pu[static_cast<std::size_t>(slack)] = 1.0;

  sol.branch_current_amp.resize(network.branches().size());
  sol.branch_loss_kw.resize(network.branches().size());
  std::vector<double> cur_re(network.branches().size());
  std::vector<double> cur_im(network.branches().size());
  std::vector<double> r_pu(network.branches().size());
  for (std::size_t b = 0; b < network.branches().size(); ++b) {
    cur_re[b] = branch_current[b].real();
    cur_im[b] = branch_current[b].imag();
    r_pu[b] = network.branches()[b].resistance_ohm / z_base;
    double i2 = std::norm(branch_current[b]);
    sol.branch_current_amp[b] =
        std::sqrt(i2) * network.base_current_amp();
    sol.branch_loss_kw[b] = i2 * r_pu[b] * s_base_kw;
  }
  // loss bookkeeping uses the same sum-|I|^2-r kernel the metrics rely on
  sol.total_loss_kw = kernels::weighted_sum_sq(cur_re.data(), cur_im.data(),
                                               r_pu.data(), r_pu.size()) *
                      s_base_kw;

  cplx slack_current(0.0, 0.0);
  for (std::size_t k = 1; k < order.size(); ++k) {
    int u = order[k];
    if (parent[static_cast<std::size_t>(u)] == slack)
      slack_current += branch_current[static_cast<std::size_t>(
          feed[static_cast<std::size_t>(u)])];
  }
  sol.slack_injection_kw =
      (v[static_cast<std::size_t>(slack)] * std::conj(slack_current)).real() *
      s_base_kw;
  return sol;
}

std::vector<LoadFlowSolution> solve_day(const FeederNetwork& network,
                                        const std::vector<Customer>& customers,
                                        const std::vector<Schedule>& schedules,
                                        const TimeGrid& grid,
                                        double power_factor, double tol_pu,
                                        int max_iterations) {
  std::vector<LoadFlowSolution> day;
  day.reserve(static_cast<std::size_t>(grid.slots_per_day));
  for (int t = 1; t <= grid.slots_per_day; ++t) {
    SlotInjections inj =
        build_injections(network, customers, schedules, t, power_factor);
    day.push_back(solve_slot(network, inj, tol_pu, max_iterations));
    if (!day.back().converged) {
      std::ostringstream oss;
      oss << "load flow failed to converge at slot " << t << " after "
          << day.back().iterations << " iterations";
      throw ConvergenceError(oss.str());
    }
  }
  return day;
}

double daily_loss_kwh(const std::vector<LoadFlowSolution>& day,
                      const TimeGrid& grid) {
  double total_kw = 0.0;
  for (const LoadFlowSolution& sol : day) total_kw += sol.total_loss_kw;
  return grid.slot_hours * total_kw;
}

}  // namespace dsm
