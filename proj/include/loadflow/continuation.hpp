#pragma once

// Loading sweep along a fixed injection ray s(kappa) = kappa * d / ||d||_1,
// where kappa (MVA) is the total apparent power injected. Maps, for every
// condition set, the range of kappa it certifies.

#include <functional>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "loadflow/certificate.hpp"
#include "loadflow/fixed_point.hpp"
#include "loadflow/grid.hpp"

namespace loadflow {

struct SweepOptions {
  bool run_solver = true;            // fill fp_converged
  double bisection_rel_tol = 1e-6;   // relative to kappa_max
  SolveOptions solver{};
  std::vector<double> p_set = kDefaultExponents;
};

struct SweepBoundaries {
  // kappa at which the condition stops holding, when inside the swept range
  std::optional<double> corollary;
  std::optional<double> scaled_prior;
  std::optional<double> plain_prior;
  // theorem interval around the known state's own kappa; an end is absent
  // when it lies outside [0, kappa_max]
  std::optional<double> theorem_lower;
  std::optional<double> theorem_upper;
};

struct SweepResult {
  std::vector<double> kappa;  // MVA
  std::vector<bool> theorem;  // all false without a known state
  std::vector<bool> corollary;
  std::vector<bool> scaled_prior;
  std::vector<bool> plain_prior;
  std::vector<bool> fp_converged;
  ComplexVector direction;    // unit 1-norm ray, per-unit
  std::optional<double> kappa_hat;  // MVA, with a known state
  SweepBoundaries boundaries;
};

/// Scalars that make every condition along the ray an O(1) test.
struct RayConstants {
  double xi_direction = 0.0;                 // xi(d)
  std::vector<PriorConditionDetail> plain;   // evaluated at d
  std::vector<PriorConditionDetail> scaled;  // evaluated at d
};

RayConstants ray_constants(const KernelMatrix& kernel, const ComplexVector& direction,
                           std::span<const double> p_set);

/// Sweeps kappa over `steps` evenly spaced points of [0, kappa_max].
/// The ray follows the known state's injections when given, otherwise
/// `injections`. Throws std::invalid_argument for steps < 2,
/// kappa_max <= 0 or a zero ray.
SweepResult sweep(const PreparedGrid& grid, const KernelMatrix& kernel,
                  const ComplexVector& injections,
                  const std::optional<OperatingPoint>& known_state, double kappa_max, int steps,
                  const SweepOptions& options = {});

/// Bisects a monotone predicate with condition(lo) != condition(hi) down to
/// a bracket narrower than tol, returning the bracket midpoint. Throws
/// std::invalid_argument for an invalid bracket.
double bisect_boundary(const std::function<bool(double)>& condition, double lo, double hi,
                       double tol);

/// kappa,theorem,corollary,improved,prior,fp_converged - one row per point.
void write_sweep_table(std::ostream& out, const SweepResult& result);

}  // namespace loadflow
