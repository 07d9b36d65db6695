#include "loadflow/sparse_lu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace loadflow {

namespace {

// Doubly linked lists of indices bucketed by their current nonzero count.
class CountBuckets {
 public:
  explicit CountBuckets(int n)
      : head_(n + 2, -1), next_(n, -1), prev_(n, -1), count_(n, -1) {}

  void insert(int idx, int count) {
    count = std::min(count, static_cast<int>(head_.size()) - 1);
    count_[idx] = count;
    prev_[idx] = -1;
    next_[idx] = head_[count];
    if (head_[count] >= 0) prev_[head_[count]] = idx;
    head_[count] = idx;
  }

  void remove(int idx) {
    const int c = count_[idx];
    if (c < 0) return;
    if (prev_[idx] >= 0) {
      next_[prev_[idx]] = next_[idx];
    } else {
      head_[c] = next_[idx];
    }
    if (next_[idx] >= 0) prev_[next_[idx]] = prev_[idx];
    count_[idx] = -1;
  }

  void update(int idx, int count) {
    remove(idx);
    insert(idx, count);
  }

  [[nodiscard]] int first(int count) const {
    return count < static_cast<int>(head_.size()) ? head_[count] : -1;
  }
  [[nodiscard]] int next(int idx) const { return next_[idx]; }
  [[nodiscard]] int max_count() const { return static_cast<int>(head_.size()) - 1; }

 private:
  std::vector<int> head_;
  std::vector<int> next_;
  std::vector<int> prev_;
  std::vector<int> count_;
};

struct Entry {
  int col;
  Complex value;
};

struct Candidate {
  int row = -1;
  int col = -1;
  long cost = std::numeric_limits<long>::max();
  double magnitude = 0.0;

  [[nodiscard]] bool found() const { return row >= 0; }
  [[nodiscard]] bool worse_than(long c, double mag) const {
    return c < cost || (c == cost && mag > magnitude);
  }
};

// Active submatrix during elimination: values live in rows, columns keep
// only their row pattern.
class ActiveMatrix {
 public:
  explicit ActiveMatrix(const SparseMatrix& a)
      : n_(static_cast<int>(a.rows())), rows_(n_), cols_(n_), row_buckets_(n_), col_buckets_(n_) {
    for (int j = 0; j < a.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
        rows_[it.row()].push_back({j, it.value()});
        cols_[j].push_back(static_cast<int>(it.row()));
      }
    }
    for (int i = 0; i < n_; ++i) {
      row_buckets_.insert(i, static_cast<int>(rows_[i].size()));
      col_buckets_.insert(i, static_cast<int>(cols_[i].size()));
    }
    pivot_mark_.assign(n_, -1);
    pivot_value_.assign(n_, Complex{});
    touched_.assign(n_, -1);
  }

  [[nodiscard]] bool has_empty_line() const {
    return row_buckets_.first(0) >= 0 || col_buckets_.first(0) >= 0;
  }

  Candidate select_pivot(const LuOptions& opt) const {
    Candidate best;
    for (int k = 1; k <= col_buckets_.max_count(); ++k) {
      const long floor_cost = static_cast<long>(k - 1) * (k - 1);
      for (int j = col_buckets_.first(k); j >= 0; j = col_buckets_.next(j)) {
        const double cmax = column_max(j);
        for (int i : cols_[j]) {
          const double mag = std::abs(value(i, j));
          if (!admissible(mag, cmax, opt)) continue;
          const long cost = static_cast<long>(rows_[i].size() - 1) * (k - 1);
          if (best.worse_than(cost, mag)) best = {i, j, cost, mag};
        }
        if (best.found() && best.cost <= floor_cost) return best;
      }
      for (int i = row_buckets_.first(k); i >= 0; i = row_buckets_.next(i)) {
        for (const Entry& e : rows_[i]) {
          const double mag = std::abs(e.value);
          if (!admissible(mag, column_max(e.col), opt)) continue;
          const long cost = static_cast<long>(k - 1) * (cols_[e.col].size() - 1);
          if (best.worse_than(cost, mag)) best = {i, e.col, cost, mag};
        }
        if (best.found() && best.cost <= static_cast<long>(k) * (k - 1)) return best;
      }
      // Anything not yet visited has row and column counts above k.
      if (best.found() && best.cost <= static_cast<long>(k) * k) return best;
    }
    return best;
  }

  struct StepOutput {
    std::vector<Entry> upper_row;                  // includes the pivot
    std::vector<std::pair<int, Complex>> lower_col;  // (row, multiplier)
    long fill = 0;
  };

  StepOutput eliminate(int p, int q) {
    StepOutput out;
    ++stamp_;
    Complex pivot{};
    for (const Entry& e : rows_[p]) {
      out.upper_row.push_back(e);
      if (e.col == q) {
        pivot = e.value;
      } else {
        pivot_mark_[e.col] = stamp_;
        pivot_value_[e.col] = e.value;
      }
      erase_row_from_col(e.col, p);
    }
    rows_[p].clear();
    row_buckets_.remove(p);
    col_buckets_.remove(q);

    for (int i : cols_[q]) {
      auto& row = rows_[i];
      auto it = std::find_if(row.begin(), row.end(), [q](const Entry& e) { return e.col == q; });
      const Complex multiplier = it->value / pivot;
      *it = row.back();
      row.pop_back();
      out.lower_col.emplace_back(i, multiplier);

      const int tag = ++touch_counter_;
      for (Entry& e : row) {
        if (pivot_mark_[e.col] == stamp_) {
          e.value -= multiplier * pivot_value_[e.col];
          touched_[e.col] = tag;
        }
      }
      for (const Entry& u : out.upper_row) {
        if (u.col == q || touched_[u.col] == tag) continue;
        row.push_back({u.col, -multiplier * u.value});
        cols_[u.col].push_back(i);
        ++out.fill;
      }
      row_buckets_.update(i, static_cast<int>(row.size()));
    }
    cols_[q].clear();
    for (const Entry& u : out.upper_row) {
      if (u.col != q) col_buckets_.update(u.col, static_cast<int>(cols_[u.col].size()));
    }
    return out;
  }

 private:
  static bool admissible(double mag, double column_max, const LuOptions& opt) {
    return mag >= opt.zero_pivot_floor && mag >= opt.pivot_threshold * column_max;
  }

  [[nodiscard]] Complex value(int i, int j) const {
    for (const Entry& e : rows_[i]) {
      if (e.col == j) return e.value;
    }
    return {};
  }

  [[nodiscard]] double column_max(int j) const {
    double m = 0.0;
    for (int i : cols_[j]) m = std::max(m, std::abs(value(i, j)));
    return m;
  }

  void erase_row_from_col(int j, int i) {
    auto& col = cols_[j];
    auto it = std::find(col.begin(), col.end(), i);
    if (it != col.end()) {
      *it = col.back();
      col.pop_back();
    }
  }

  int n_;
  std::vector<std::vector<Entry>> rows_;
  std::vector<std::vector<int>> cols_;
  CountBuckets row_buckets_;
  CountBuckets col_buckets_;
  std::vector<int> pivot_mark_;
  std::vector<Complex> pivot_value_;
  std::vector<int> touched_;
  int stamp_ = 0;
  int touch_counter_ = 0;
};

}  // namespace

LuFactors factorize(const SparseMatrix& a, const LuOptions& options) {
  if (a.rows() != a.cols()) {
    throw DimensionError("factorize: matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  }
  const int n = static_cast<int>(a.rows());

  ActiveMatrix active(a);
  LuFactors f;
  f.row_perm_.resize(n);
  f.col_perm_.resize(n);
  std::vector<int> row_pos(n, -1);
  std::vector<int> col_pos(n, -1);
  std::vector<std::vector<std::pair<int, Complex>>> lower_cols(n);
  std::vector<std::vector<Entry>> upper_rows(n);

  for (int step = 0; step < n; ++step) {
    if (active.has_empty_line()) {
      throw NumericalError("factorize: matrix is structurally singular at step " +
                           std::to_string(step));
    }
    const Candidate c = active.select_pivot(options);
    if (!c.found()) {
      throw NumericalError("factorize: no admissible pivot above " +
                           std::to_string(options.zero_pivot_floor) + " at step " +
                           std::to_string(step));
    }
    f.row_perm_[step] = c.row;
    f.col_perm_[step] = c.col;
    row_pos[c.row] = step;
    col_pos[c.col] = step;
    auto out = active.eliminate(c.row, c.col);
    f.fill_in_count_ += out.fill;
    lower_cols[step] = std::move(out.lower_col);
    upper_rows[step] = std::move(out.upper_row);
  }

  std::vector<Eigen::Triplet<Complex>> lt;
  std::vector<Eigen::Triplet<Complex>> ut;
  for (int k = 0; k < n; ++k) {
    lt.emplace_back(k, k, Complex{1.0, 0.0});
    for (const auto& [row, l] : lower_cols[k]) lt.emplace_back(row_pos[row], k, l);
    for (const Entry& e : upper_rows[k]) ut.emplace_back(k, col_pos[e.col], e.value);
  }
  f.lower_.resize(n, n);
  f.lower_.setFromTriplets(lt.begin(), lt.end());
  f.lower_.makeCompressed();
  f.upper_.resize(n, n);
  f.upper_.setFromTriplets(ut.begin(), ut.end());
  f.upper_.makeCompressed();
  return f;
}

ComplexVector LuFactors::solve(const ComplexVector& rhs) const {
  const int n = size();
  if (rhs.size() != n) {
    throw DimensionError("solve: rhs has length " + std::to_string(rhs.size()) +
                         ", expected " + std::to_string(n));
  }
  ComplexVector y(n);
  for (int k = 0; k < n; ++k) y[k] = rhs[row_perm_[k]];

  for (int k = 0; k < n; ++k) {
    const Complex yk = y[k];
    if (yk == Complex{}) continue;
    for (SparseMatrix::InnerIterator it(lower_, k); it; ++it) {
      if (it.row() > k) y[it.row()] -= it.value() * yk;
    }
  }

  for (int k = n - 1; k >= 0; --k) {
    Complex sum = y[k];
    Complex diag{};
    for (Eigen::SparseMatrix<Complex, Eigen::RowMajor, int>::InnerIterator it(upper_, k); it;
         ++it) {
      if (it.col() == k) {
        diag = it.value();
      } else {
        sum -= it.value() * y[it.col()];
      }
    }
    y[k] = sum / diag;
  }

  ComplexVector x(n);
  for (int k = 0; k < n; ++k) x[col_perm_[k]] = y[k];
  return x;
}

ComplexMatrix LuFactors::solve_many(const ComplexMatrix& rhs_columns) const {
  if (rhs_columns.rows() != size()) {
    throw DimensionError("solve_many: rhs has " + std::to_string(rhs_columns.rows()) +
                         " rows, expected " + std::to_string(size()));
  }
  ComplexMatrix out(rhs_columns.rows(), rhs_columns.cols());
  for (Eigen::Index c = 0; c < rhs_columns.cols(); ++c) {
    out.col(c) = solve(rhs_columns.col(c));
  }
  return out;
}

}  // namespace loadflow
