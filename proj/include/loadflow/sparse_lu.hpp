#pragma once

#include <vector>

#include "loadflow/types.hpp"

namespace loadflow {

struct LuOptions {
  // A candidate pivot must reach this fraction of the largest magnitude in
  // its active column.
  double pivot_threshold = 0.1;
  // Admissible pivots below this magnitude are treated as zero.
  double zero_pivot_floor = 1e-13;
};

/// Sparse LU factors with row and column permutations:
///   P_row * A * P_col = L * U
/// where row k of P_row*A is row row_perm()[k] of A and column k of
/// A*P_col is column col_perm()[k] of A. L is unit lower triangular (the
/// unit diagonal is stored), U upper triangular.
///
/// Immutable once built; concurrent solves against one instance are safe.
class LuFactors {
 public:
  [[nodiscard]] int size() const { return static_cast<int>(row_perm_.size()); }
  [[nodiscard]] const SparseMatrix& lower() const { return lower_; }
  [[nodiscard]] const Eigen::SparseMatrix<Complex, Eigen::RowMajor, int>& upper() const {
    return upper_;
  }
  [[nodiscard]] const std::vector<int>& row_perm() const { return row_perm_; }
  [[nodiscard]] const std::vector<int>& col_perm() const { return col_perm_; }
  /// Structural entries created during elimination that were absent from A.
  [[nodiscard]] long fill_in_count() const { return fill_in_count_; }

  /// Solves A x = rhs. Throws DimensionError on length mismatch.
  [[nodiscard]] ComplexVector solve(const ComplexVector& rhs) const;
  /// Column-wise solve; a 0-column input yields a 0-column result.
  [[nodiscard]] ComplexMatrix solve_many(const ComplexMatrix& rhs_columns) const;

 private:
  friend LuFactors factorize(const SparseMatrix& a, const LuOptions& options);

  SparseMatrix lower_;
  Eigen::SparseMatrix<Complex, Eigen::RowMajor, int> upper_;
  std::vector<int> row_perm_;
  std::vector<int> col_perm_;
  long fill_in_count_ = 0;
};

/// Markowitz-pivoted sparse LU. At every step the pivot minimizes
/// (r_i - 1)(c_j - 1) over the active submatrix among entries passing the
/// column threshold test. Throws NumericalError when no admissible pivot
/// exceeds the zero floor, DimensionError for a non-square input.
LuFactors factorize(const SparseMatrix& a, const LuOptions& options = {});

}  // namespace loadflow
