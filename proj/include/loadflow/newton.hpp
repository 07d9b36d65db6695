#pragma once

// Newton-Raphson load flow in rectangular coordinates. Serves only as an
// independent cross-check of the fixed-point solver.

#include "loadflow/admittance.hpp"
#include "loadflow/types.hpp"

namespace loadflow {

/// m_j = s_j - v_j conj((Y_LL v + Y_L0 v0)_j)
ComplexVector power_mismatch(const AdmittanceSystem& sys, const ComplexVector& v,
                             const ComplexVector& s);

/// Derivative of [Re m; Im m] with respect to [Re v; Im v] (2N x 2N).
RealMatrix mismatch_jacobian(const AdmittanceSystem& sys, const ComplexVector& v);

struct NewtonOptions {
  double tol = 1e-10;  // on ||m||_inf
  int max_iter = 50;
};

struct NewtonResult {
  ComplexVector v;
  int iterations = 0;
  double mismatch = 0.0;
  bool converged = false;
};

/// Throws NumericalError on a singular Jacobian.
NewtonResult solve_newton(const AdmittanceSystem& sys, const ComplexVector& s,
                          const ComplexVector& v0, const NewtonOptions& options = {});

}  // namespace loadflow
