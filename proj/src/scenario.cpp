#include "dsm/scenario.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dsm {

using nlohmann::json;

namespace {

const json& member(const json& obj, const std::string& key,
                   const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError("scenario: missing field '" + key + "' in " + ctx);
  return *it;
}

std::vector<double> double_array(const json& arr, const std::string& ctx) {
  if (!arr.is_array())
    throw ValidationError("scenario: " + ctx + " must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) out.push_back(v.get<double>());
  return out;
}

PenaltySchedule parse_penalty(const json& obj, const std::string& ctx) {
  PenaltySchedule p;
  p.low = member(obj, "low", ctx).get<double>();
  p.med = member(obj, "med", ctx).get<double>();
  p.high = member(obj, "high", ctx).get<double>();
  return p;
}

Appliance parse_appliance(const json& obj, const std::string& ctx) {
  Appliance a;
  a.id = member(obj, "id", ctx).get<std::string>();
  const std::string actx = ctx + " appliance '" + a.id + "'";
  a.rating_kw = member(obj, "rating_kw", actx).get<double>();
  a.duration_slots = member(obj, "duration_slots", actx).get<int>();
  a.window_start = member(obj, "window_start", actx).get<int>();
  a.window_end = member(obj, "window_end", actx).get<int>();
  a.flexibility = flexibility_from_string(
      member(obj, "flexibility", actx).get<std::string>());
  a.criticality = criticality_from_string(
      member(obj, "criticality", actx).get<std::string>());
  for (const auto& s : member(obj, "baseline_on_slots", actx))
    a.baseline_on_slots.push_back(s.get<int>());
  return a;
}

Customer parse_customer(const json& obj) {
  Customer c;
  c.id = member(obj, "id", "customer").get<std::string>();
  const std::string ctx = "customer '" + c.id + "'";
  c.kind =
      customer_kind_from_string(member(obj, "kind", ctx).get<std::string>());
  c.bus = member(obj, "bus", ctx).get<int>();
  c.max_demand_kw = member(obj, "max_demand_kw", ctx).get<double>();
  c.has_pv = obj.value("has_pv", false);
  if (obj.contains("pv") && !obj["pv"].is_null()) {
    PvProfile pv;
    pv.scale = obj["pv"].value("scale", 1.0);
    pv.generation_kw =
        double_array(member(obj["pv"], "generation_kw", ctx + " pv"),
                     ctx + " pv.generation_kw");
    c.pv = std::move(pv);
  }
  for (const auto& a : member(obj, "appliances", ctx))
    c.appliances.push_back(parse_appliance(a, ctx));
  return c;
}

}  // namespace

void Scenario::validate() const {
  time_grid.validate();
  residential_tariff.validate(time_grid);
  commercial_tariff.validate(time_grid);
  residential_penalty.validate();
  commercial_penalty.validate();
  if (power_factor <= 0.0 || power_factor > 1.0)
    throw ValidationError("scenario: power_factor must lie in (0, 1]");
  if (options.participation_pct < 0 || options.participation_pct > 100)
    throw ValidationError("scenario: participation_pct must lie in [0, 100]");
  if (options.pv_scale < 0.0)
    throw ValidationError("scenario: pv_scale must be nonnegative");
  if (options.commercial_dsm != "auto" && options.commercial_dsm != "always" &&
      options.commercial_dsm != "never")
    throw ValidationError("scenario: commercial_dsm must be auto, always, or "
                          "never");

  bool any_resistance = false;
  for (const Branch& b : network.branches())
    any_resistance = any_resistance || b.resistance_ohm > 0.0;
  if (!any_resistance)
    throw ValidationError("scenario: every branch has zero resistance; loss "
                          "studies need at least one resistive branch");

  std::set<std::string> ids;
  for (const Customer& c : customers) {
    if (!ids.insert(c.id).second)
      throw ValidationError("scenario: duplicate customer id '" + c.id + "'");
    if (!network.has_bus(c.bus))
      throw ValidationError("scenario: customer '" + c.id +
                            "' references unknown bus " +
                            std::to_string(c.bus));
    c.validate(time_grid);
  }
}

Scenario parse_scenario(const std::string& json_text,
                        const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario " + origin + ": " + e.what());
  }

  TimeGrid grid;
  const json& time = member(doc, "time", "document");
  grid.slots_per_day = member(time, "slots_per_day", "time").get<int>();
  grid.slot_hours = member(time, "slot_hours", "time").get<double>();

  const json& tariffs = member(doc, "tariffs", "document");
  Tariff res_tariff{double_array(member(tariffs, "residential", "tariffs"),
                                 "tariffs.residential")};
  Tariff com_tariff{double_array(member(tariffs, "commercial", "tariffs"),
                                 "tariffs.commercial")};

  const json& penalties = member(doc, "penalties", "document");
  PenaltySchedule res_pen = parse_penalty(
      member(penalties, "residential", "penalties"), "penalties.residential");
  PenaltySchedule com_pen = parse_penalty(
      member(penalties, "commercial", "penalties"), "penalties.commercial");

  const json& net = member(doc, "network", "document");
  std::vector<int> buses;
  for (const auto& b : member(net, "buses", "network"))
    buses.push_back(b.get<int>());
  std::vector<Branch> branches;
  for (const auto& b : member(net, "branches", "network"))
    branches.push_back(Branch{member(b, "from", "branch").get<int>(),
                              member(b, "to", "branch").get<int>(),
                              member(b, "r_ohm", "branch").get<double>(),
                              member(b, "x_ohm", "branch").get<double>()});
  FeederNetwork network(std::move(buses),
                        member(net, "slack_bus", "network").get<int>(),
                        std::move(branches),
                        member(net, "base_kv", "network").get<double>(),
                        member(net, "base_mva", "network").get<double>());

  std::vector<Customer> customers;
  for (const auto& c : member(doc, "customers", "document"))
    customers.push_back(parse_customer(c));

  ScenarioOptions options;
  if (doc.contains("options")) {
    const json& o = doc["options"];
    options.participation_pct = o.value("participation_pct", 100);
    options.pv_scale = o.value("pv_scale", 1.0);
    options.dsm_enabled = o.value("dsm_enabled", true);
    options.commercial_dsm = o.value("commercial_dsm", std::string("auto"));
  }

  Scenario scenario{doc.value("name", origin),
                    grid,
                    std::move(res_tariff),
                    std::move(com_tariff),
                    res_pen,
                    com_pen,
                    doc.value("power_factor", 0.95),
                    std::move(customers),
                    std::move(network),
                    options,
                    fnv1a_hex(json_text)};
  scenario.validate();
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("scenario: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path);
}

std::string scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["name"] = scenario.name;
  doc["time"] = {{"slots_per_day", scenario.time_grid.slots_per_day},
                 {"slot_hours", scenario.time_grid.slot_hours}};
  doc["tariffs"] = {
      {"residential", scenario.residential_tariff.price_cents_per_kwh},
      {"commercial", scenario.commercial_tariff.price_cents_per_kwh}};
  doc["penalties"] = {{"residential",
                       {{"low", scenario.residential_penalty.low},
                        {"med", scenario.residential_penalty.med},
                        {"high", scenario.residential_penalty.high}}},
                      {"commercial",
                       {{"low", scenario.commercial_penalty.low},
                        {"med", scenario.commercial_penalty.med},
                        {"high", scenario.commercial_penalty.high}}}};
  doc["power_factor"] = scenario.power_factor;

  json net;
  net["base_kv"] = scenario.network.base_kv();
  net["base_mva"] = scenario.network.base_mva();
  net["slack_bus"] = scenario.network.slack_bus();
  net["buses"] = scenario.network.bus_ids();
  net["branches"] = json::array();
  for (const Branch& b : scenario.network.branches())
    net["branches"].push_back({{"from", b.from_bus},
                               {"to", b.to_bus},
                               {"r_ohm", b.resistance_ohm},
                               {"x_ohm", b.reactance_ohm}});
  doc["network"] = std::move(net);

  doc["customers"] = json::array();
  for (const Customer& c : scenario.customers) {
    json jc;
    jc["id"] = c.id;
    jc["kind"] = to_string(c.kind);
    jc["bus"] = c.bus;
    jc["max_demand_kw"] = c.max_demand_kw;
    jc["has_pv"] = c.has_pv;
    if (c.pv.has_value())
      jc["pv"] = {{"scale", c.pv->scale},
                  {"generation_kw", c.pv->generation_kw}};
    jc["appliances"] = json::array();
    for (const Appliance& a : c.appliances)
      jc["appliances"].push_back({{"id", a.id},
                                  {"rating_kw", a.rating_kw},
                                  {"duration_slots", a.duration_slots},
                                  {"window_start", a.window_start},
                                  {"window_end", a.window_end},
                                  {"flexibility", to_string(a.flexibility)},
                                  {"criticality", to_string(a.criticality)},
                                  {"baseline_on_slots", a.baseline_on_slots}});
    doc["customers"].push_back(std::move(jc));
  }

  doc["options"] = {{"participation_pct", scenario.options.participation_pct},
                    {"pv_scale", scenario.options.pv_scale},
                    {"dsm_enabled", scenario.options.dsm_enabled},
                    {"commercial_dsm", scenario.options.commercial_dsm}};
  return doc.dump(2) + "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream oss;
  oss << std::hex << h;
  return oss.str();
}

}  // namespace dsm
