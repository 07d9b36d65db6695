#pragma once

#include "loadflow/admittance.hpp"
#include "loadflow/network.hpp"
#include "loadflow/sparse_lu.hpp"
#include "loadflow/zero_load.hpp"

namespace loadflow {

/// A network together with its admittance partition, the factors of Y_LL
/// and the zero-load profile. Everything downstream works from this.
struct PreparedGrid {
  NetworkDescription net;
  AdmittanceSystem sys;
  LuFactors factors;
  ZeroLoadProfile w;
};

/// Runs the structural invertibility check (NumericalError with the
/// diagnostic on failure), assembles Y, factorizes Y_LL and computes w.
PreparedGrid prepare_grid(NetworkDescription net);

}  // namespace loadflow
