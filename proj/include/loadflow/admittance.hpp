#pragma once

#include <optional>
#include <string>

#include "loadflow/network.hpp"
#include "loadflow/types.hpp"

namespace loadflow {

/// Nodal admittance data partitioned around the slack bus.
struct AdmittanceSystem {
  SparseMatrix y_ll;      // load x load
  ComplexVector y_l0;     // load x slack column
  Complex slack_voltage{1.0, 0.0};
  int n = 0;              // load bus count
};

/// Full (N+1)x(N+1) admittance matrix in canonical bus order.
///
/// Lines stamp [[y, -y], [-y, y]]. A transformer with primary i, secondary j,
/// primary-side admittance y and ratio K stamps
///   [[y, -y/K], [-y/conj(K), y/|K|^2]].
/// Shunts add onto the diagonal. Parallel branches accumulate.
SparseMatrix build_full_admittance(const NetworkDescription& net);

AdmittanceSystem build_admittance(const NetworkDescription& net);

/// Structural argument for invertibility of Y_LL: every bus reaches the
/// slack, every branch has positive conductance, every shunt non-negative
/// conductance. Returns nullopt when satisfied, otherwise a diagnostic
/// naming the first offending element.
std::optional<std::string> structural_invertibility_check(const NetworkDescription& net);

}  // namespace loadflow
