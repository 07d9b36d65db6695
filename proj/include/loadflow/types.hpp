#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace loadflow {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Column-major (compressed sparse column) storage.
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;

/// Raised when a numerical precondition fails at run time: zero pivot,
/// degenerate zero-load profile, voltage collapse, dimension mismatch.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace loadflow
