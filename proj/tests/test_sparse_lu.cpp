#include <doctest.h>

#include <vector>

#include "loadflow/sparse_lu.hpp"
#include "support/test_support.hpp"

using namespace loadflow;
using namespace loadflow::testing;

namespace {

SparseMatrix from_dense(const ComplexMatrix& a) { return a.sparseView(); }

// ||P_row A P_col - L U||_F / ||A||_F
double factor_residual(const SparseMatrix& a, const LuFactors& f) {
  const ComplexMatrix ad = dense(a);
  const int n = f.size();
  ComplexMatrix pap(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pap(i, j) = ad(f.row_perm()[i], f.col_perm()[j]);
  const ComplexMatrix lu = ComplexMatrix(f.lower()) * ComplexMatrix(f.upper());
  return (pap - lu).norm() / ad.norm();
}

// Random sparse matrix with a dominant diagonal and a random off-diagonal
// pattern; structurally and numerically invertible.
SparseMatrix random_sparse(Rng& rng, int n) {
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && uniform(rng, 0, 1) < 0.15) a(i, j) = random_complex(rng, 1.0);
    }
  }
  for (int i = 0; i < n; ++i) a(i, i) = random_complex(rng, 1.0) + Complex(a.row(i).cwiseAbs().sum() + 0.5, 0);
  return from_dense(a);
}

}  // namespace

TEST_CASE("scalar matrix") {
  const Complex y{2.0, -3.0};
  ComplexMatrix a(1, 1);
  a(0, 0) = y;
  const LuFactors f = factorize(from_dense(a));
  CHECK(ComplexMatrix(f.lower())(0, 0) == Complex(1.0, 0.0));
  CHECK(ComplexMatrix(f.upper())(0, 0) == y);
  CHECK(f.fill_in_count() == 0);
  const ComplexMatrix inv = f.solve_many(ComplexMatrix::Identity(1, 1));
  CHECK(std::abs(inv(0, 0) - 1.0 / y) < 1e-16);
}

TEST_CASE("diagonal matrix has no fill-in") {
  Rng rng(1);
  ComplexMatrix a = ComplexMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) a(i, i) = random_complex(rng, 1.0) + Complex(1.0, 0.0);
  const LuFactors f = factorize(from_dense(a));
  CHECK(f.fill_in_count() == 0);
  CHECK(factor_residual(from_dense(a), f) < 1e-15);
}

TEST_CASE("13-bus Y_LL factors and solves") {
  const AdmittanceSystem sys = build_admittance(load_network(data_path("ieee13/network.json")));
  const LuFactors f = factorize(sys.y_ll);
  CHECK(factor_residual(sys.y_ll, f) < 1e-10);
  CHECK(f.fill_in_count() >= 0);

  CHECK(max_abs(f.solve(ComplexVector::Zero(12))) == 0.0);

  const ComplexMatrix yd = dense(sys.y_ll);
  for (int k = 0; k < 12; ++k) {
    const ComplexVector x = f.solve(yd.col(k));
    ComplexVector e = ComplexVector::Zero(12);
    e[k] = 1.0;
    CHECK(max_abs(ComplexVector(x - e)) < 1e-10);
  }

  Rng rng(12);
  const ComplexVector b = random_vector(rng, 12);
  const ComplexVector x = f.solve(b);
  CHECK(max_abs(ComplexVector(x - dense_solve(sys.y_ll, b))) < 1e-9);
  CHECK(max_abs(ComplexVector(yd * x - b)) / max_abs(b) < 1e-10);

  const ComplexMatrix inv = f.solve_many(ComplexMatrix::Identity(12, 12));
  CHECK(max_abs(ComplexMatrix(yd * inv - ComplexMatrix::Identity(12, 12))) < 1e-9);
  CHECK(max_abs(ComplexMatrix(inv - dense_inverse(sys.y_ll))) < 1e-9);
  CHECK(f.solve_many(ComplexMatrix(12, 0)).cols() == 0);
}

TEST_CASE("random sparse matrices against the dense oracle") {
  Rng rng(77);
  for (int t = 0; t < 50; ++t) {
    const int n = uniform_int(rng, 1, 30);
    const SparseMatrix a = random_sparse(rng, n);
    const LuFactors f = factorize(a);
    CHECK(factor_residual(a, f) < 1e-10);
    const ComplexVector b = random_vector(rng, n);
    CHECK(max_abs(ComplexVector(f.solve(b) - dense_solve(a, b))) < 1e-9);
  }
}

TEST_CASE("random network admittances against the dense oracle") {
  Rng rng(78);
  for (int t = 0; t < 30; ++t) {
    const AdmittanceSystem sys = build_admittance(random_network(rng));
    const LuFactors f = factorize(sys.y_ll);
    CHECK(factor_residual(sys.y_ll, f) < 1e-10);
    const ComplexVector b = random_vector(rng, sys.n);
    CHECK(max_abs(ComplexVector(f.solve(b) - dense_solve(sys.y_ll, b))) < 1e-9);
  }
}

TEST_CASE("factors are immutable across solves") {
  Rng rng(2);
  const SparseMatrix a = random_sparse(rng, 20);
  const LuFactors f = factorize(a);
  const ComplexVector b = random_vector(rng, 20);
  const ComplexVector first = f.solve(b);
  for (int k = 0; k < 5; ++k) (void)f.solve(random_vector(rng, 20));
  const ComplexVector again = f.solve(b);
  CHECK((first.array() == again.array()).all());
  const LuFactors g = factorize(a);
  CHECK((g.solve(b).array() == first.array()).all());
}

TEST_CASE("radial chains fill in at most linearly") {
  for (int n : {100, 1000, 10000}) {
    const AdmittanceSystem sys = build_admittance(radial_chain(n));
    const LuFactors f = factorize(sys.y_ll);
    CHECK(f.fill_in_count() <= 4L * n);
    const ComplexVector x = f.solve(-sys.y_l0 * sys.slack_voltage);
    CHECK(max_abs(ComplexVector(x.array() - 1.0)) < 1e-9);
  }
}

TEST_CASE("arrow matrix is ordered to avoid fill") {
  // Dense first row and column: eliminating the hub first would fill
  // everything, Markowitz defers it.
  const int n = 40;
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = Complex(4.0, 1.0);
  for (int i = 1; i < n; ++i) a(0, i) = a(i, 0) = Complex(-0.05, 0.02);
  const LuFactors f = factorize(from_dense(a));
  CHECK(f.fill_in_count() == 0);
  CHECK(factor_residual(from_dense(a), f) < 1e-12);
}

TEST_CASE("errors") {
  ComplexMatrix rect = ComplexMatrix::Ones(2, 3);
  CHECK_THROWS_AS(factorize(from_dense(rect)), DimensionError);

  ComplexMatrix singular = ComplexMatrix::Zero(3, 3);
  singular(0, 0) = 1.0;
  singular(1, 1) = 1.0;
  CHECK_THROWS_AS(factorize(from_dense(singular)), NumericalError);

  ComplexMatrix rank_one = ComplexMatrix::Ones(3, 3);
  CHECK_THROWS_AS(factorize(from_dense(rank_one)), NumericalError);

  ComplexMatrix ok = ComplexMatrix::Identity(3, 3);
  const LuFactors f = factorize(from_dense(ok));
  CHECK_THROWS_AS((void)f.solve(ComplexVector::Zero(2)), DimensionError);
  CHECK_THROWS_AS((void)f.solve_many(ComplexMatrix::Zero(4, 1)), DimensionError);
}
