#include "loadflow/zero_load.hpp"

#include <limits>
#include <string>

namespace loadflow {

namespace {

void require_same_length(const ComplexVector& a, const ComplexVector& b, const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": length " + std::to_string(a.size()) +
                         " does not match zero-load profile length " +
                         std::to_string(b.size()));
  }
}

}  // namespace

ZeroLoadProfile compute_w(const AdmittanceSystem& sys, const LuFactors& factors) {
  if (factors.size() != sys.n) {
    throw DimensionError("compute_w: factors do not match the admittance system");
  }
  ZeroLoadProfile profile{factors.solve(-sys.y_l0 * sys.slack_voltage)};
  for (Eigen::Index i = 0; i < profile.w.size(); ++i) {
    if (!(std::abs(profile.w[i]) >= kZeroLoadFloor)) {
      throw NumericalError("compute_w: zero-load voltage of load bus " + std::to_string(i) +
                           " is below the degeneracy floor");
    }
  }
  return profile;
}

ComplexVector normalize(const ComplexVector& v, const ZeroLoadProfile& w) {
  require_same_length(v, w.w, "normalize");
  return v.cwiseQuotient(w.w);
}

ComplexVector denormalize(const ComplexVector& u, const ZeroLoadProfile& w) {
  require_same_length(u, w.w, "denormalize");
  return u.cwiseProduct(w.w);
}

double u_min(const ComplexVector& v_hat, const ZeroLoadProfile& w) {
  require_same_length(v_hat, w.w, "u_min");
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < v_hat.size(); ++j) {
    m = std::min(m, std::abs(v_hat[j] / w.w[j]));
  }
  return m;
}

double weighted_inf_norm(const ComplexVector& x, const ZeroLoadProfile& w) {
  require_same_length(x, w.w, "weighted_inf_norm");
  double m = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) m = std::max(m, std::abs(x[j] / w.w[j]));
  return m;
}

}  // namespace loadflow
