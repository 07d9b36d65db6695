#pragma once

// Existence/uniqueness certificates for the load-flow solution.
//
// Everything here is driven by the kernel K = W^-1 Y_LL^-1 conj(W)^-1 and
// the loading measure
//
//   xi(s) = || K diag(conj(s)) ||_inf = max_i sum_j |K_ij| |s_j|.
//
// Given a known solution pair (v_hat, s_hat) and a candidate injection s,
// the unique solution near v_hat exists when
//
//   xi(s_hat) < u_min^2   and
//   delta = (u_min - xi(s_hat)/u_min)^2 - 4 xi(s - s_hat) > 0,
//
// and lies within rho |w_i| of v_hat_i with
//   rho = ((u_min - xi(s_hat)/u_min) - sqrt(delta)) / 2.
// With no known state, (w, 0) is a valid pair and the test becomes
// xi(s) < 1/4 with rho = (1 - sqrt(1 - 4 xi(s))) / 2.

#include <optional>
#include <span>
#include <vector>

#include "loadflow/network.hpp"
#include "loadflow/sparse_lu.hpp"
#include "loadflow/types.hpp"
#include "loadflow/zero_load.hpp"

namespace loadflow {

struct KernelMatrix {
  ComplexMatrix k;
  RealMatrix abs;      // |K_ij|
  RealVector row_abs;  // sum_j |K_ij|
  RealVector col_max;  // max_h |K_hj|

  [[nodiscard]] int size() const { return static_cast<int>(k.rows()); }
};

inline constexpr int kDefaultKernelCap = 5000;

/// Materializes K densely through one sparse solve per identity column.
/// Refuses (std::length_error) when the system has more than `max_size`
/// load buses.
KernelMatrix build_kernel(const LuFactors& factors, const ZeroLoadProfile& w,
                          int max_size = kDefaultKernelCap);

double xi(const KernelMatrix& kernel, const ComplexVector& s);

/// xi restricted to the given kernel rows. On a radial, lines-only network
/// with inductive branches the maximum is attained at a leaf row, so
/// passing leaf_rows(net) reproduces xi at O(leaves * N) cost.
double xi_over_rows(const KernelMatrix& kernel, const ComplexVector& s,
                    std::span<const int> rows);

/// Load indices of leaf buses (degree one, slack excluded). Throws
/// std::invalid_argument when the network is not a tree.
std::vector<int> leaf_rows(const NetworkDescription& net);

struct TheoremCheck {
  double xi_s_hat = 0.0;
  double xi_delta_s = 0.0;
  double u_min = 0.0;
  double delta = 0.0;
  bool ok = false;
  std::optional<double> rho;
};

struct CorollaryCheck {
  double xi_s = 0.0;
  bool ok = false;
  std::optional<double> rho;
};

/// Pure function of the three scalars; strict inequalities.
TheoremCheck evaluate_theorem(double xi_s_hat, double xi_delta_s, double u_min);
TheoremCheck check_theorem(const KernelMatrix& kernel, double u_min, const ComplexVector& s_hat,
                           const ComplexVector& s);

CorollaryCheck evaluate_corollary(double xi_s);
CorollaryCheck check_corollary(const KernelMatrix& kernel, const ComplexVector& s);

// Prior sufficient conditions, compared against the corollary. For a
// Hoelder exponent p with conjugate q:
//   plain:   ||K||*_p ||s||_q < 1/4
//   scaled:  ||K Lambda||*_p ||Lambda^-1 s||_q < 1/4,
//            Lambda_k = 1 / max_h |K_hk|
// where ||A||*_p is the largest p-norm of a row of A.

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline const std::vector<double> kDefaultExponents{1.0, 2.0, kInfinity};

/// q = p / (p - 1); throws std::invalid_argument unless p is 1, 2 or inf.
double conjugate_exponent(double p);

/// p-norm of a non-negative vector (p = inf allowed).
double vector_norm(const RealVector& x, double p);

/// max over rows of the row p-norm.
double max_row_norm(const RealMatrix& abs_entries, double p);

/// Lambda_k = 1 / max_h |K_hk|.
RealVector scaled_condition_weights(const KernelMatrix& kernel);

/// ||K diag(lambda)||*_p * ||diag(lambda)^-1 s||_q for positive lambda.
double holder_bound(const KernelMatrix& kernel, const ComplexVector& s, const RealVector& lambda,
                    double p);

struct PriorConditionDetail {
  double p = 0.0;
  double q = 0.0;
  double matrix_norm = 0.0;
  double injection_norm = 0.0;
  double product = 0.0;
  bool ok = false;
};

struct PriorCheck {
  std::vector<PriorConditionDetail> plain;
  std::vector<PriorConditionDetail> scaled;
  bool plain_ok = false;   // passes for some p
  bool scaled_ok = false;  // passes for some p
};

PriorCheck check_prior_conditions(const KernelMatrix& kernel, const ComplexVector& s,
                                  std::span<const double> p_set = kDefaultExponents);

struct CertificateReport {
  CorollaryCheck corollary;
  std::optional<TheoremCheck> theorem;  // present when a known state was supplied
  PriorCheck prior;
};

/// Runs every condition set. `known_state` carries (v_hat, s_hat).
CertificateReport certify(const KernelMatrix& kernel, const ZeroLoadProfile& w,
                          const ComplexVector& s,
                          const std::optional<OperatingPoint>& known_state,
                          std::span<const double> p_set = kDefaultExponents);

/// Per-coordinate ball { v : |v_i - center_i| <= rho |w_i| }.
class SolutionBall {
 public:
  SolutionBall(ComplexVector center, double rho, const ZeroLoadProfile& w);

  [[nodiscard]] bool contains(const ComplexVector& v, double slack = 0.0) const;
  [[nodiscard]] const ComplexVector& center() const { return center_; }
  [[nodiscard]] const RealVector& radius() const { return radius_; }
  [[nodiscard]] double rho() const { return rho_; }

 private:
  ComplexVector center_;
  RealVector radius_;
  double rho_;
};

/// Ball around v_hat certified by a passing theorem check. Throws
/// std::logic_error when the check failed.
SolutionBall solution_ball(const TheoremCheck& check, const ComplexVector& v_hat,
                           const ZeroLoadProfile& w);
/// Ball around w certified by a passing corollary check.
SolutionBall solution_ball(const CorollaryCheck& check, const ZeroLoadProfile& w);

}  // namespace loadflow
