#include "loadflow/grid.hpp"

namespace loadflow {

PreparedGrid prepare_grid(NetworkDescription net) {
  if (auto diagnostic = structural_invertibility_check(net)) {
    throw NumericalError("Y_LL is not structurally invertible: " + *diagnostic);
  }
  PreparedGrid grid;
  grid.sys = build_admittance(net);
  grid.factors = factorize(grid.sys.y_ll);
  grid.w = compute_w(grid.sys, grid.factors);
  grid.net = std::move(net);
  return grid;
}

}  // namespace loadflow
