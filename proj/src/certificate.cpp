#include "loadflow/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace loadflow {

KernelMatrix build_kernel(const LuFactors& factors, const ZeroLoadProfile& w, int max_size) {
  const int n = factors.size();
  if (n > max_size) {
    throw std::length_error("build_kernel: " + std::to_string(n) +
                            " load buses exceeds the dense kernel cap of " +
                            std::to_string(max_size));
  }
  if (w.w.size() != n) {
    throw DimensionError("build_kernel: zero-load profile does not match the factors");
  }

  KernelMatrix kernel;
  kernel.k = factors.solve_many(ComplexMatrix::Identity(n, n));
  const ComplexVector inv_w = w.w.cwiseInverse();
  kernel.k = inv_w.asDiagonal() * kernel.k * inv_w.conjugate().asDiagonal();
  kernel.abs = kernel.k.cwiseAbs();
  kernel.row_abs = kernel.abs.rowwise().sum();
  kernel.col_max = n > 0 ? RealVector(kernel.abs.colwise().maxCoeff().transpose()) : RealVector();
  return kernel;
}

double xi(const KernelMatrix& kernel, const ComplexVector& s) {
  if (s.size() != kernel.size()) {
    throw DimensionError("xi: injection length does not match the kernel");
  }
  if (s.size() == 0) return 0.0;
  return (kernel.abs * s.cwiseAbs()).maxCoeff();
}

double xi_over_rows(const KernelMatrix& kernel, const ComplexVector& s,
                    std::span<const int> rows) {
  if (s.size() != kernel.size()) {
    throw DimensionError("xi_over_rows: injection length does not match the kernel");
  }
  const RealVector mag = s.cwiseAbs();
  double best = 0.0;
  for (int r : rows) best = std::max(best, kernel.abs.row(r).dot(mag));
  return best;
}

std::vector<int> leaf_rows(const NetworkDescription& net) {
  const int size = static_cast<int>(net.buses.size());
  std::set<std::pair<int, int>> edges;
  for (const Branch& br : net.branches) {
    const int a = net.index_of(br.from_bus).value();
    const int b = net.index_of(br.to_bus).value();
    edges.emplace(std::min(a, b), std::max(a, b));
  }
  if (static_cast<int>(edges.size()) != size - 1) {
    throw std::invalid_argument("leaf_rows: network is not radial");
  }
  std::vector<int> degree(size, 0);
  for (const auto& [a, b] : edges) {
    ++degree[a];
    ++degree[b];
  }
  std::vector<int> leaves;
  for (int i = 1; i < size; ++i) {
    if (degree[i] == 1) leaves.push_back(i - 1);
  }
  return leaves;
}

TheoremCheck evaluate_theorem(double xi_s_hat, double xi_delta_s, double u_min) {
  TheoremCheck c;
  c.xi_s_hat = xi_s_hat;
  c.xi_delta_s = xi_delta_s;
  c.u_min = u_min;
  const double axis = u_min - xi_s_hat / u_min;
  c.delta = axis * axis - 4.0 * xi_delta_s;
  c.ok = xi_s_hat < u_min * u_min && c.delta > 0.0;
  if (c.ok) {
    // Smaller root of r^2 - axis r + xi_delta_s, written without the
    // cancellation in (axis - sqrt(delta)) / 2.
    c.rho = 2.0 * xi_delta_s / (axis + std::sqrt(c.delta));
  }
  return c;
}

TheoremCheck check_theorem(const KernelMatrix& kernel, double u_min, const ComplexVector& s_hat,
                           const ComplexVector& s) {
  return evaluate_theorem(xi(kernel, s_hat), xi(kernel, s - s_hat), u_min);
}

CorollaryCheck evaluate_corollary(double xi_s) {
  CorollaryCheck c;
  c.xi_s = xi_s;
  c.ok = xi_s < 0.25;
  if (c.ok) c.rho = 2.0 * xi_s / (1.0 + std::sqrt(1.0 - 4.0 * xi_s));
  return c;
}

CorollaryCheck check_corollary(const KernelMatrix& kernel, const ComplexVector& s) {
  return evaluate_corollary(xi(kernel, s));
}

double conjugate_exponent(double p) {
  if (p == 1.0) return kInfinity;
  if (p == 2.0) return 2.0;
  if (p == kInfinity) return 1.0;
  throw std::invalid_argument("Hoelder exponent must be 1, 2 or infinity");
}

double vector_norm(const RealVector& x, double p) {
  if (x.size() == 0) return 0.0;
  if (p == kInfinity) return x.cwiseAbs().maxCoeff();
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p == 2.0) return x.norm();
  return std::pow(x.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

double max_row_norm(const RealMatrix& abs_entries, double p) {
  double best = 0.0;
  for (Eigen::Index h = 0; h < abs_entries.rows(); ++h) {
    best = std::max(best, vector_norm(abs_entries.row(h).transpose(), p));
  }
  return best;
}

RealVector scaled_condition_weights(const KernelMatrix& kernel) {
  return kernel.col_max.cwiseInverse();
}

double holder_bound(const KernelMatrix& kernel, const ComplexVector& s, const RealVector& lambda,
                    double p) {
  const double q = conjugate_exponent(p);
  const RealMatrix scaled = kernel.abs * lambda.asDiagonal();
  const RealVector scaled_s = s.cwiseAbs().cwiseQuotient(lambda);
  return max_row_norm(scaled, p) * vector_norm(scaled_s, q);
}

namespace {

PriorConditionDetail prior_detail(const RealMatrix& abs_entries, const RealVector& s_abs,
                                  double p) {
  PriorConditionDetail d;
  d.p = p;
  d.q = conjugate_exponent(p);
  d.matrix_norm = max_row_norm(abs_entries, p);
  d.injection_norm = vector_norm(s_abs, d.q);
  d.product = d.matrix_norm * d.injection_norm;
  d.ok = d.product < 0.25;
  return d;
}

}  // namespace

PriorCheck check_prior_conditions(const KernelMatrix& kernel, const ComplexVector& s,
                                  std::span<const double> p_set) {
  if (s.size() != kernel.size()) {
    throw DimensionError("check_prior_conditions: injection length does not match the kernel");
  }
  PriorCheck out;
  const RealVector s_abs = s.cwiseAbs();
  const RealVector lambda = scaled_condition_weights(kernel);
  const RealMatrix scaled = kernel.abs * lambda.asDiagonal();
  const RealVector scaled_s = s_abs.cwiseQuotient(lambda);
  for (double p : p_set) {
    out.plain.push_back(prior_detail(kernel.abs, s_abs, p));
    out.scaled.push_back(prior_detail(scaled, scaled_s, p));
    out.plain_ok = out.plain_ok || out.plain.back().ok;
    out.scaled_ok = out.scaled_ok || out.scaled.back().ok;
  }
  return out;
}

CertificateReport certify(const KernelMatrix& kernel, const ZeroLoadProfile& w,
                          const ComplexVector& s,
                          const std::optional<OperatingPoint>& known_state,
                          std::span<const double> p_set) {
  CertificateReport report;
  report.corollary = check_corollary(kernel, s);
  if (known_state) {
    report.theorem =
        check_theorem(kernel, u_min(known_state->v, w), known_state->s, s);
  }
  report.prior = check_prior_conditions(kernel, s, p_set);
  return report;
}

SolutionBall::SolutionBall(ComplexVector center, double rho, const ZeroLoadProfile& w)
    : center_(std::move(center)), radius_(rho * w.w.cwiseAbs()), rho_(rho) {
  if (center_.size() != w.w.size()) {
    throw DimensionError("SolutionBall: center does not match the zero-load profile");
  }
}

bool SolutionBall::contains(const ComplexVector& v, double slack) const {
  if (v.size() != center_.size()) return false;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(std::abs(v[i] - center_[i]) <= radius_[i] + slack)) return false;
  }
  return true;
}

SolutionBall solution_ball(const TheoremCheck& check, const ComplexVector& v_hat,
                           const ZeroLoadProfile& w) {
  if (!check.ok || !check.rho) {
    throw std::logic_error("solution_ball: theorem conditions do not hold");
  }
  return SolutionBall(v_hat, *check.rho, w);
}

SolutionBall solution_ball(const CorollaryCheck& check, const ZeroLoadProfile& w) {
  if (!check.ok || !check.rho) {
    throw std::logic_error("solution_ball: corollary condition does not hold");
  }
  return SolutionBall(w.w, *check.rho, w);
}

}  // namespace loadflow
