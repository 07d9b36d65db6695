#include "loadflow/network.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace loadflow {

using nlohmann::json;

namespace {

[[noreturn]] void fail(NetworkErrorKind kind, const std::string& msg) {
  throw NetworkError(kind, msg);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(NetworkErrorKind::schema, where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(NetworkErrorKind::schema, where + ": missing field '" + key + "'");
  }
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) {
    fail(NetworkErrorKind::schema, where + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback,
                 const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj, key, where);
}

std::string text(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    fail(NetworkErrorKind::schema, where + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

const json& array(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_array()) {
    fail(NetworkErrorKind::schema, where + ": field '" + key + "' must be an array");
  }
  return v;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(NetworkErrorKind::schema, std::string("malformed document: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string branch_label(std::size_t k, const Branch& br) {
  return "branch #" + std::to_string(k) + " (" + br.from_bus + " -> " + br.to_bus + ")";
}

const char* kind_name(BusKind k) { return k == BusKind::slack ? "slack" : "load"; }
const char* kind_name(BranchKind k) {
  return k == BranchKind::line ? "line" : "transformer";
}

}  // namespace

std::optional<int> NetworkDescription::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == id) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> NetworkDescription::load_index_of(std::string_view id) const {
  auto idx = index_of(id);
  if (!idx || *idx == 0) return std::nullopt;
  return *idx - 1;
}

void validate(const NetworkDescription& net) {
  if (!(net.bases.power_mva > 0.0) || !(net.bases.voltage_kv > 0.0)) {
    fail(NetworkErrorKind::invalid_base, "bases must be positive");
  }

  const auto slack_count = std::count_if(net.buses.begin(), net.buses.end(),
                                         [](const Bus& b) { return b.kind == BusKind::slack; });
  if (slack_count != 1) {
    fail(NetworkErrorKind::slack_count,
         "expected exactly one slack bus, found " + std::to_string(slack_count));
  }
  if (net.buses.front().kind != BusKind::slack) {
    fail(NetworkErrorKind::schema, "slack bus must be first in canonical order");
  }

  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const Bus& b = net.buses[i];
    if (!index.emplace(b.id, static_cast<int>(i)).second) {
      fail(NetworkErrorKind::duplicate_bus, "duplicate bus id '" + b.id + "'");
    }
    if (b.shunt_admittance.real() < 0.0 || !std::isfinite(b.shunt_admittance.real()) ||
        !std::isfinite(b.shunt_admittance.imag())) {
      fail(NetworkErrorKind::negative_shunt_conductance,
           "bus '" + b.id + "': shunt conductance must be finite and >= 0");
    }
  }

  std::vector<int> parent(net.buses.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& br = net.branches[k];
    auto from = index.find(br.from_bus);
    auto to = index.find(br.to_bus);
    if (from == index.end() || to == index.end()) {
      fail(NetworkErrorKind::dangling_branch,
           branch_label(k, br) + ": references an unknown bus");
    }
    if (from->second == to->second) {
      fail(NetworkErrorKind::self_loop, branch_label(k, br) + ": both ends on one bus");
    }
    if (!(br.admittance.real() > 0.0) || !std::isfinite(br.admittance.real()) ||
        !std::isfinite(br.admittance.imag())) {
      fail(NetworkErrorKind::non_positive_conductance,
           branch_label(k, br) + ": conductance must be finite and > 0");
    }
    if (br.ratio == Complex(0.0, 0.0) || !std::isfinite(br.ratio.real()) ||
        !std::isfinite(br.ratio.imag())) {
      fail(NetworkErrorKind::invalid_ratio, branch_label(k, br) + ": ratio must be nonzero");
    }
    if (br.kind == BranchKind::line && br.ratio != Complex(1.0, 0.0)) {
      fail(NetworkErrorKind::invalid_ratio, branch_label(k, br) + ": a line has ratio 1");
    }
    parent[find(from->second)] = find(to->second);
  }

  const int root = find(0);
  for (std::size_t i = 1; i < net.buses.size(); ++i) {
    if (find(static_cast<int>(i)) != root) {
      fail(NetworkErrorKind::disconnected,
           "bus '" + net.buses[i].id + "' is not connected to the slack bus");
    }
  }
}

NetworkDescription parse_network(std::string_view document) {
  const json doc = parse_json(document);
  if (!doc.is_object()) fail(NetworkErrorKind::schema, "network document must be an object");

  NetworkDescription net;
  const json& bases = require(doc, "bases", "network");
  net.bases.power_mva = number(bases, "power_mva", "bases");
  net.bases.voltage_kv = number(bases, "voltage_kv", "bases");

  if (doc.contains("slack_voltage")) {
    const json& sv = doc["slack_voltage"];
    net.slack_voltage = {number(sv, "re", "slack_voltage"), number(sv, "im", "slack_voltage")};
  }

  std::vector<Bus> loads;
  std::vector<Bus> slacks;
  const json& buses = array(doc, "buses", "network");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const std::string where = "buses[" + std::to_string(i) + "]";
    Bus bus;
    bus.id = text(buses[i], "id", where);
    const std::string kind = text(buses[i], "kind", where);
    if (kind == "slack") {
      bus.kind = BusKind::slack;
    } else if (kind == "load") {
      bus.kind = BusKind::load;
    } else {
      fail(NetworkErrorKind::schema, where + ": unknown bus kind '" + kind + "'");
    }
    bus.shunt_admittance = {number_or(buses[i], "shunt_g", 0.0, where),
                            number_or(buses[i], "shunt_b", 0.0, where)};
    (bus.kind == BusKind::slack ? slacks : loads).push_back(std::move(bus));
  }
  if (slacks.size() != 1) {
    fail(NetworkErrorKind::slack_count,
         "expected exactly one slack bus, found " + std::to_string(slacks.size()));
  }
  net.buses.push_back(std::move(slacks.front()));
  std::move(loads.begin(), loads.end(), std::back_inserter(net.buses));

  const json& branches = array(doc, "branches", "network");
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const std::string where = "branches[" + std::to_string(k) + "]";
    Branch br;
    br.from_bus = text(branches[k], "from", where);
    br.to_bus = text(branches[k], "to", where);
    const std::string kind = text(branches[k], "kind", where);
    if (kind == "line") {
      br.kind = BranchKind::line;
    } else if (kind == "transformer") {
      br.kind = BranchKind::transformer;
    } else {
      fail(NetworkErrorKind::schema, where + ": unknown branch kind '" + kind + "'");
    }
    br.admittance = {number(branches[k], "g", where), number(branches[k], "b", where)};
    br.ratio = {number_or(branches[k], "ratio_re", 1.0, where),
                number_or(branches[k], "ratio_im", 0.0, where)};
    net.branches.push_back(std::move(br));
  }

  validate(net);
  return net;
}

std::string serialize_network(const NetworkDescription& net) {
  json doc;
  doc["bases"] = {{"power_mva", net.bases.power_mva}, {"voltage_kv", net.bases.voltage_kv}};
  doc["slack_voltage"] = {{"re", net.slack_voltage.real()}, {"im", net.slack_voltage.imag()}};
  json buses = json::array();
  for (const Bus& b : net.buses) {
    buses.push_back({{"id", b.id},
                     {"kind", kind_name(b.kind)},
                     {"shunt_g", b.shunt_admittance.real()},
                     {"shunt_b", b.shunt_admittance.imag()}});
  }
  doc["buses"] = std::move(buses);
  json branches = json::array();
  for (const Branch& br : net.branches) {
    branches.push_back({{"from", br.from_bus},
                        {"to", br.to_bus},
                        {"kind", kind_name(br.kind)},
                        {"g", br.admittance.real()},
                        {"b", br.admittance.imag()},
                        {"ratio_re", br.ratio.real()},
                        {"ratio_im", br.ratio.imag()}});
  }
  doc["branches"] = std::move(branches);
  return doc.dump(2) + "\n";
}

NetworkDescription load_network(const std::string& path) {
  return parse_network(read_file(path));
}

Complex to_per_unit(Complex power_mw_mvar, double power_base) {
  if (!(power_base > 0.0)) {
    throw std::invalid_argument("power base must be positive");
  }
  return power_mw_mvar / power_base;
}

namespace {

ComplexVector injections_from(const json& doc, const NetworkDescription& net) {
  ComplexVector s = ComplexVector::Zero(net.load_count());
  const json& list = array(doc, "injections", "injections");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "injections[" + std::to_string(i) + "]";
    const std::string id = text(list[i], "bus", where);
    auto k = net.load_index_of(id);
    if (!k) {
      fail(NetworkErrorKind::unknown_bus,
           where + ": '" + id + "' is not a load bus of this network");
    }
    const Complex mva{number(list[i], "p_mw", where), number(list[i], "q_mvar", where)};
    s[*k] += to_per_unit(mva, net.bases.power_mva);
  }
  return s;
}

}  // namespace

InjectionVector parse_injections(std::string_view document, const NetworkDescription& net) {
  const json doc = parse_json(document);
  return InjectionVector{injections_from(doc, net)};
}

InjectionVector load_injections(const std::string& path, const NetworkDescription& net) {
  return parse_injections(read_file(path), net);
}

OperatingPoint parse_operating_point(std::string_view document,
                                     const NetworkDescription& net) {
  const json doc = parse_json(document);
  OperatingPoint op;
  op.s = injections_from(doc, net);
  op.v = ComplexVector::Zero(net.load_count());
  std::vector<bool> seen(net.load_count(), false);
  const json& list = array(doc, "voltages", "operating point");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "voltages[" + std::to_string(i) + "]";
    const std::string id = text(list[i], "bus", where);
    auto k = net.load_index_of(id);
    if (!k) {
      fail(NetworkErrorKind::unknown_bus,
           where + ": '" + id + "' is not a load bus of this network");
    }
    if (seen[*k]) fail(NetworkErrorKind::schema, where + ": repeated voltage for '" + id + "'");
    seen[*k] = true;
    op.v[*k] = {number(list[i], "re", where), number(list[i], "im", where)};
  }
  for (int k = 0; k < net.load_count(); ++k) {
    if (!seen[k]) {
      fail(NetworkErrorKind::schema,
           "operating point has no voltage for bus '" + net.buses[k + 1].id + "'");
    }
  }
  return op;
}

OperatingPoint load_operating_point(const std::string& path, const NetworkDescription& net) {
  return parse_operating_point(read_file(path), net);
}

std::string serialize_operating_point(const OperatingPoint& op,
                                      const NetworkDescription& net) {
  json injections = json::array();
  json voltages = json::array();
  for (int k = 0; k < net.load_count(); ++k) {
    const std::string& id = net.buses[k + 1].id;
    const Complex mva = op.s[k] * net.bases.power_mva;
    injections.push_back({{"bus", id}, {"p_mw", mva.real()}, {"q_mvar", mva.imag()}});
    voltages.push_back({{"bus", id}, {"re", op.v[k].real()}, {"im", op.v[k].imag()}});
  }
  json doc;
  doc["injections"] = std::move(injections);
  doc["voltages"] = std::move(voltages);
  return doc.dump(2) + "\n";
}

}  // namespace loadflow
