#pragma once

#include "loadflow/admittance.hpp"
#include "loadflow/sparse_lu.hpp"
#include "loadflow/types.hpp"

namespace loadflow {

/// Load-bus voltages of the unloaded grid (s = 0). Used as the diagonal
/// scaling W = diag(w) of the normalized coordinates u = W^-1 v.
struct ZeroLoadProfile {
  ComplexVector w;
};

// |w_i| below this many per-unit makes W singular for practical purposes.
inline constexpr double kZeroLoadFloor = 1e-9;

/// Solves Y_LL w = -Y_L0 v0. Throws NumericalError if some |w_i| falls
/// below kZeroLoadFloor.
ZeroLoadProfile compute_w(const AdmittanceSystem& sys, const LuFactors& factors);

ComplexVector normalize(const ComplexVector& v, const ZeroLoadProfile& w);
ComplexVector denormalize(const ComplexVector& u, const ZeroLoadProfile& w);

/// min_j |v_hat_j / w_j|
double u_min(const ComplexVector& v_hat, const ZeroLoadProfile& w);

/// Weighted infinity norm ||W^-1 x||_inf.
double weighted_inf_norm(const ComplexVector& x, const ZeroLoadProfile& w);

}  // namespace loadflow
