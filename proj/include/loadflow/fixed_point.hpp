#pragma once

#include <optional>
#include <vector>

#include "loadflow/admittance.hpp"
#include "loadflow/certificate.hpp"
#include "loadflow/sparse_lu.hpp"
#include "loadflow/types.hpp"
#include "loadflow/zero_load.hpp"

namespace loadflow {

class VoltageCollapse : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Iterates below this magnitude (per-unit) are treated as collapsed.
inline constexpr double kVoltageFloor = 1e-6;

/// One application of G(v) = w + Y_LL^-1 (conj(s) ./ conj(v)).
/// Throws VoltageCollapse if some |v_i| is below kVoltageFloor.
ComplexVector iterate_once(const LuFactors& factors, const ZeroLoadProfile& w,
                           const ComplexVector& s, const ComplexVector& v);

/// The same map in normalized coordinates:
///   G~(u) = 1 + K (conj(s) ./ conj(u)).
ComplexVector normalized_map(const KernelMatrix& kernel, const ComplexVector& s,
                             const ComplexVector& u);

struct SolveOptions {
  double tol = 1e-9;  // on ||u(k+1) - u(k)||_inf
  int max_iter = 200;
  // Ball certified for this s, if any. Enables the containment flag.
  std::optional<SolutionBall> certified_ball;
};

struct SolveResult {
  ComplexVector v;
  int iterations = 0;
  double final_step = 0.0;      // ||v(k+1) - v(k)||_{W,inf}
  double residual = 0.0;        // ||v - G(v)||_{W,inf}
  double residual_plain = 0.0;  // ||v - G(v)||_inf
  bool converged = false;
  bool certified = false;       // launched under a passing certificate
  bool contained_in_d = false;  // meaningful only when certified
  std::vector<double> steps;    // step size of every iteration
};

/// Plain fixed-point iteration from v0 until the step in the weighted
/// norm drops below tol or max_iter applications have been made. A run
/// that does not converge returns converged = false with the last iterate.
SolveResult solve_fixed_point(const LuFactors& factors, const ZeroLoadProfile& w,
                              const ComplexVector& s, const ComplexVector& v0,
                              const SolveOptions& options = {});

/// |v_i - v_hat_i| <= rho |w_i| + 1e-9 for every i.
bool verify_containment(const SolveResult& result, const ComplexVector& v_hat,
                        const ZeroLoadProfile& w, double rho);

/// ||v_hat - G(v_hat)||_{W,inf} for a claimed solution pair.
double operating_point_residual(const LuFactors& factors, const ZeroLoadProfile& w,
                                const OperatingPoint& op);

}  // namespace loadflow
