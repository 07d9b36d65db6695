#include "loadflow/fixed_point.hpp"

#include <string>

namespace loadflow {

namespace {

void check_floor(const ComplexVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(std::abs(v[i]) > kVoltageFloor)) {
      throw VoltageCollapse("voltage at load bus " + std::to_string(i) +
                            " fell below the collapse floor");
    }
  }
}

}  // namespace

ComplexVector iterate_once(const LuFactors& factors, const ZeroLoadProfile& w,
                           const ComplexVector& s, const ComplexVector& v) {
  if (s.size() != w.w.size() || v.size() != w.w.size()) {
    throw DimensionError("iterate_once: vector lengths do not match");
  }
  check_floor(v);
  const ComplexVector currents = s.conjugate().cwiseQuotient(v.conjugate());
  return w.w + factors.solve(currents);
}

ComplexVector normalized_map(const KernelMatrix& kernel, const ComplexVector& s,
                             const ComplexVector& u) {
  if (s.size() != kernel.size() || u.size() != kernel.size()) {
    throw DimensionError("normalized_map: vector lengths do not match");
  }
  check_floor(u);
  return ComplexVector::Ones(u.size()) + kernel.k * s.conjugate().cwiseQuotient(u.conjugate());
}

SolveResult solve_fixed_point(const LuFactors& factors, const ZeroLoadProfile& w,
                              const ComplexVector& s, const ComplexVector& v0,
                              const SolveOptions& options) {
  SolveResult result;
  result.v = v0;
  for (int k = 0; k < options.max_iter; ++k) {
    ComplexVector next = iterate_once(factors, w, s, result.v);
    const double step = weighted_inf_norm(next - result.v, w);
    result.v = std::move(next);
    result.iterations = k + 1;
    result.final_step = step;
    result.steps.push_back(step);
    if (step < options.tol) {
      result.converged = true;
      break;
    }
  }

  const ComplexVector image = iterate_once(factors, w, s, result.v);
  result.residual = weighted_inf_norm(result.v - image, w);
  result.residual_plain = image.size() == 0 ? 0.0 : (result.v - image).cwiseAbs().maxCoeff();

  if (options.certified_ball) {
    result.certified = true;
    result.contained_in_d = options.certified_ball->contains(result.v, 1e-9);
  }
  return result;
}

bool verify_containment(const SolveResult& result, const ComplexVector& v_hat,
                        const ZeroLoadProfile& w, double rho) {
  return SolutionBall(v_hat, rho, w).contains(result.v, 1e-9);
}

double operating_point_residual(const LuFactors& factors, const ZeroLoadProfile& w,
                                const OperatingPoint& op) {
  return weighted_inf_norm(op.v - iterate_once(factors, w, op.s, op.v), w);
}

}  // namespace loadflow
