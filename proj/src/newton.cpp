#include "loadflow/newton.hpp"

#include <Eigen/LU>

namespace loadflow {

namespace {

ComplexVector nodal_currents(const AdmittanceSystem& sys, const ComplexVector& v) {
  return sys.y_ll * v + sys.y_l0 * sys.slack_voltage;
}

double inf_norm(const ComplexVector& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

ComplexVector power_mismatch(const AdmittanceSystem& sys, const ComplexVector& v,
                             const ComplexVector& s) {
  if (v.size() != sys.n || s.size() != sys.n) {
    throw DimensionError("power_mismatch: vector lengths do not match the system");
  }
  return s - v.cwiseProduct(nodal_currents(sys, v).conjugate());
}

RealMatrix mismatch_jacobian(const AdmittanceSystem& sys, const ComplexVector& v) {
  const int n = sys.n;
  const ComplexVector current = nodal_currents(sys, v);
  RealMatrix jac = RealMatrix::Zero(2 * n, 2 * n);

  // dm_j = -conj(i_j) dv_j - v_j conj(sum_k Y_jk dv_k), dv_k = dx_k + i dy_k
  for (int k = 0; k < sys.y_ll.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(sys.y_ll, k); it; ++it) {
      const int j = static_cast<int>(it.row());
      const Complex dx = -v[j] * std::conj(it.value());
      const Complex dy = Complex(0.0, 1.0) * v[j] * std::conj(it.value());
      jac(j, k) += dx.real();
      jac(n + j, k) += dx.imag();
      jac(j, n + k) += dy.real();
      jac(n + j, n + k) += dy.imag();
    }
  }
  for (int j = 0; j < n; ++j) {
    const Complex dx = -std::conj(current[j]);
    const Complex dy = Complex(0.0, -1.0) * std::conj(current[j]);
    jac(j, j) += dx.real();
    jac(n + j, j) += dx.imag();
    jac(j, n + j) += dy.real();
    jac(n + j, n + j) += dy.imag();
  }
  return jac;
}

NewtonResult solve_newton(const AdmittanceSystem& sys, const ComplexVector& s,
                          const ComplexVector& v0, const NewtonOptions& options) {
  const int n = sys.n;
  NewtonResult result;
  result.v = v0;
  ComplexVector m = power_mismatch(sys, result.v, s);
  result.mismatch = inf_norm(m);

  while (result.mismatch >= options.tol && result.iterations < options.max_iter) {
    Eigen::FullPivLU<RealMatrix> lu(mismatch_jacobian(sys, result.v));
    if (!lu.isInvertible()) {
      throw NumericalError("solve_newton: singular Jacobian at iteration " +
                           std::to_string(result.iterations));
    }
    RealVector rhs(2 * n);
    rhs << -m.real(), -m.imag();
    const RealVector dx = lu.solve(rhs);
    for (int j = 0; j < n; ++j) result.v[j] += Complex(dx[j], dx[n + j]);

    ++result.iterations;
    m = power_mismatch(sys, result.v, s);
    result.mismatch = inf_norm(m);
  }
  result.converged = result.mismatch < options.tol;
  return result;
}

}  // namespace loadflow
