#pragma once

// Grid data model: buses, branches, bases, and the on-disk network,
// injection and operating-point documents.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loadflow/types.hpp"

namespace loadflow {

enum class BusKind { slack, load };
enum class BranchKind { line, transformer };

struct Bus {
  std::string id;
  BusKind kind = BusKind::load;
  Complex shunt_admittance{0.0, 0.0};  // per-unit
};

/// A series element between two buses.
///
/// For a transformer, `from_bus` is the primary side, `admittance` is the
/// aggregated admittance seen from the primary and `ratio` is the complex
/// turns ratio. Lines always carry ratio 1.
struct Branch {
  std::string from_bus;
  std::string to_bus;
  BranchKind kind = BranchKind::line;
  Complex admittance{0.0, 0.0};  // per-unit
  Complex ratio{1.0, 0.0};
};

struct Bases {
  double power_mva = 1.0;
  double voltage_kv = 1.0;
};

/// A validated network snapshot. `buses` is in canonical order: the slack
/// bus first, then load buses in document order. Load bus k (0-based) is
/// `buses[k + 1]`.
struct NetworkDescription {
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  Bases bases;
  Complex slack_voltage{1.0, 0.0};

  /// Number of load (non-slack) buses.
  [[nodiscard]] int load_count() const {
    return static_cast<int>(buses.size()) - 1;
  }
  [[nodiscard]] const Bus& slack() const { return buses.front(); }

  /// Canonical index of a bus id (slack = 0), or nullopt.
  [[nodiscard]] std::optional<int> index_of(std::string_view id) const;
  /// Load-bus index (0-based, slack excluded) of a bus id, or nullopt.
  [[nodiscard]] std::optional<int> load_index_of(std::string_view id) const;
};

enum class NetworkErrorKind {
  schema,
  duplicate_bus,
  dangling_branch,
  non_positive_conductance,
  negative_shunt_conductance,
  slack_count,
  disconnected,
  self_loop,
  invalid_ratio,
  invalid_base,
  unknown_bus,
};

class NetworkError : public std::runtime_error {
 public:
  NetworkError(NetworkErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] NetworkErrorKind kind() const { return kind_; }

 private:
  NetworkErrorKind kind_;
};

/// Checks every type invariant of `net` and throws NetworkError on the
/// first violation. Expects buses already in canonical order.
void validate(const NetworkDescription& net);

/// Parses a network document (JSON), reorders buses canonically and
/// validates. Throws NetworkError.
NetworkDescription parse_network(std::string_view text);

/// Canonical JSON form of a network. parse_network(serialize_network(n))
/// reproduces n.
std::string serialize_network(const NetworkDescription& net);

NetworkDescription load_network(const std::string& path);

/// Converts an MW + j Mvar power to per-unit on `power_base` MVA.
Complex to_per_unit(Complex power_mw_mvar, double power_base);

/// Per-unit injections for every load bus, indexed by load index.
struct InjectionVector {
  ComplexVector s;
};

/// A measured or previously solved load-flow state (v_hat, s_hat).
struct OperatingPoint {
  ComplexVector v;  // per-unit voltages of load buses
  ComplexVector s;  // per-unit injections of load buses
};

/// Parses an injection document:
///   {"injections": [{"bus": id, "p_mw": x, "q_mvar": y}, ...]}
/// Unlisted load buses get zero injection. Listing the slack bus or an
/// unknown bus is an error. Repeated entries for one bus are summed.
InjectionVector parse_injections(std::string_view text,
                                 const NetworkDescription& net);
InjectionVector load_injections(const std::string& path,
                                const NetworkDescription& net);

/// Parses an operating-point document: an injection list plus
///   "voltages": [{"bus": id, "re": x, "im": y}, ...]
/// in per-unit. Every load bus must have a voltage.
OperatingPoint parse_operating_point(std::string_view text,
                                     const NetworkDescription& net);
OperatingPoint load_operating_point(const std::string& path,
                                    const NetworkDescription& net);

std::string serialize_operating_point(const OperatingPoint& op,
                                      const NetworkDescription& net);

}  // namespace loadflow
