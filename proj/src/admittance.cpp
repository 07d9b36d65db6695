#include "loadflow/admittance.hpp"

#include <numeric>
#include <unordered_map>
#include <vector>

namespace loadflow {

namespace {

std::unordered_map<std::string, int> bus_index(const NetworkDescription& net) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    index.emplace(net.buses[i].id, static_cast<int>(i));
  }
  return index;
}

}  // namespace

SparseMatrix build_full_admittance(const NetworkDescription& net) {
  const int size = static_cast<int>(net.buses.size());
  const auto index = bus_index(net);

  std::vector<Eigen::Triplet<Complex>> stamps;
  stamps.reserve(4 * net.branches.size() + net.buses.size());

  for (const Branch& br : net.branches) {
    const int i = index.at(br.from_bus);
    const int j = index.at(br.to_bus);
    const Complex y = br.admittance;
    if (br.kind == BranchKind::line) {
      stamps.emplace_back(i, i, y);
      stamps.emplace_back(i, j, -y);
      stamps.emplace_back(j, i, -y);
      stamps.emplace_back(j, j, y);
    } else {
      const Complex k = br.ratio;
      stamps.emplace_back(i, i, y);
      stamps.emplace_back(i, j, -y / k);
      stamps.emplace_back(j, i, -y / std::conj(k));
      stamps.emplace_back(j, j, y / std::norm(k));
    }
  }
  for (int i = 0; i < size; ++i) {
    const Complex sh = net.buses[i].shunt_admittance;
    if (sh != Complex(0.0, 0.0)) stamps.emplace_back(i, i, sh);
  }

  // Duplicates are summed in insertion order; sort first so the result does
  // not depend on the order branches were listed in.
  std::sort(stamps.begin(), stamps.end(), [](const auto& a, const auto& b) {
    if (a.col() != b.col()) return a.col() < b.col();
    if (a.row() != b.row()) return a.row() < b.row();
    if (a.value().real() != b.value().real()) return a.value().real() < b.value().real();
    return a.value().imag() < b.value().imag();
  });

  SparseMatrix y(size, size);
  y.setFromTriplets(stamps.begin(), stamps.end());
  y.makeCompressed();
  return y;
}

AdmittanceSystem build_admittance(const NetworkDescription& net) {
  const SparseMatrix full = build_full_admittance(net);
  const int n = net.load_count();

  AdmittanceSystem sys;
  sys.n = n;
  sys.slack_voltage = net.slack_voltage;
  sys.y_l0 = ComplexVector::Zero(n);

  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(full.nonZeros());
  for (int col = 0; col < full.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (row == 0) continue;
      if (col == 0) {
        sys.y_l0[row - 1] = it.value();
      } else {
        entries.emplace_back(row - 1, col - 1, it.value());
      }
    }
  }
  sys.y_ll.resize(n, n);
  sys.y_ll.setFromTriplets(entries.begin(), entries.end());
  sys.y_ll.makeCompressed();
  return sys;
}

std::optional<std::string> structural_invertibility_check(const NetworkDescription& net) {
  if (net.buses.empty()) return "network has no buses";

  const auto index = bus_index(net);
  std::vector<int> parent(net.buses.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& br = net.branches[k];
    const std::string label =
        "branch #" + std::to_string(k) + " (" + br.from_bus + " -> " + br.to_bus + ")";
    auto from = index.find(br.from_bus);
    auto to = index.find(br.to_bus);
    if (from == index.end() || to == index.end()) {
      return label + ": unknown endpoint";
    }
    if (!(br.admittance.real() > 0.0)) {
      return label + ": conductance " + std::to_string(br.admittance.real()) +
             " is not positive";
    }
    parent[find(from->second)] = find(to->second);
  }
  for (const Bus& bus : net.buses) {
    if (bus.shunt_admittance.real() < 0.0) {
      return "bus '" + bus.id + "': shunt conductance " +
             std::to_string(bus.shunt_admittance.real()) + " is negative";
    }
  }
  // Every component of the graph with the slack removed touches the slack
  // iff every bus is in the slack's component of the full graph.
  const auto slack = net.index_of(net.slack().id);
  const int root = find(slack.value_or(0));
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    if (find(static_cast<int>(i)) != root) {
      return "bus '" + net.buses[i].id + "' has no path to the slack bus";
    }
  }
  return std::nullopt;
}

}  // namespace loadflow
