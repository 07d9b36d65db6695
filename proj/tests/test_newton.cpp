#include <doctest.h>

#include "loadflow/fixed_point.hpp"
#include "loadflow/newton.hpp"
#include "support/test_support.hpp"

using namespace loadflow;
using namespace loadflow::testing;

namespace {

// Central differences of [Re m; Im m] with respect to [Re v; Im v].
RealMatrix finite_difference_jacobian(const AdmittanceSystem& sys, const ComplexVector& v,
                                      const ComplexVector& s, double h) {
  const int n = static_cast<int>(v.size());
  RealMatrix j(2 * n, 2 * n);
  for (int c = 0; c < 2 * n; ++c) {
    const Complex dir = c < n ? Complex(h, 0.0) : Complex(0.0, h);
    ComplexVector plus = v, minus = v;
    plus[c % n] += dir;
    minus[c % n] -= dir;
    const ComplexVector d = (power_mismatch(sys, plus, s) - power_mismatch(sys, minus, s)) / (2 * h);
    j.col(c) << d.real(), d.imag();
  }
  return j;
}

}  // namespace

TEST_CASE("mismatch vanishes at a fixed point") {
  Rng rng(61);
  for (int t = 0; t < 10; ++t) {
    const PreparedGrid g = prepare_grid(random_network(rng));
    const KernelMatrix kernel = build_kernel(g.factors, g.w);
    const ComplexVector s = injections_with_xi(rng, kernel, 0.15);
    const SolveResult r = solve_fixed_point(g.factors, g.w, s, g.w.w, {.tol = 1e-13});
    REQUIRE(r.converged);
    CHECK(max_abs(power_mismatch(g.sys, r.v, s)) < 1e-9);
    CHECK(max_abs(power_mismatch(g.sys, g.w.w, ComplexVector::Zero(s.size()))) < 1e-12);
  }
}

TEST_CASE("mismatch matches branch-by-branch power balance") {
  Rng rng(62);
  for (int t = 0; t < 30; ++t) {
    NetworkDescription net = random_network(rng);
    net.slack_voltage = std::polar(uniform(rng, 0.95, 1.05), uniform(rng, -0.2, 0.2));
    const AdmittanceSystem sys = build_admittance(net);
    const int n = net.load_count();
    const ComplexVector v = random_vector(rng, n, 0.2).array() + Complex(1.0, 0.0);
    const ComplexVector s = random_vector(rng, n);
    CHECK(max_abs(ComplexVector(power_mismatch(sys, v, s) - branchwise_mismatch(net, v, s))) <
          1e-10);
  }
}

TEST_CASE("analytic Jacobian against central differences") {
  Rng rng(63);
  for (int t = 0; t < 20; ++t) {
    RandomNetworkOptions opt;
    opt.max_loads = 8;
    const AdmittanceSystem sys = build_admittance(random_network(rng, opt));
    const ComplexVector v = random_vector(rng, sys.n, 0.3).array() + Complex(1.0, 0.0);
    const ComplexVector s = random_vector(rng, sys.n);
    const RealMatrix analytic = mismatch_jacobian(sys, v);
    const RealMatrix numeric = finite_difference_jacobian(sys, v, s, 1e-7);
    CHECK((analytic - numeric).norm() / analytic.norm() < 1e-6);
  }
}

TEST_CASE("Newton from the zero-load profile") {
  Rng rng(64);
  const PreparedGrid g = prepare_grid(random_network(rng));
  const NewtonResult r = solve_newton(g.sys, ComplexVector::Zero(g.net.load_count()), g.w.w);
  CHECK(r.converged);
  CHECK(r.iterations <= 1);
}

TEST_CASE("Newton on a single load bus") {
  Rng rng(65);
  for (int t = 0; t < 50; ++t) {
    const Complex y{uniform(rng, 0.5, 10.0), -uniform(rng, 0.5, 30.0)};
    const Complex s = std::polar(uniform(rng, 0.0, 0.24) * std::abs(y), uniform(rng, -M_PI, M_PI));
    const AdmittanceSystem sys = build_admittance(single_bus_network(y));
    const NewtonResult r = solve_newton(sys, ComplexVector::Constant(1, s), ComplexVector::Ones(1));
    REQUIRE(r.converged);
    CHECK(std::abs(r.v[0] - single_bus_closed_form(y, s)) < 1e-10);
  }
}

TEST_CASE("Newton agrees with the fixed point") {
  Rng rng(66);
  for (int t = 0; t < 30; ++t) {
    const PreparedGrid g = prepare_grid(random_network(rng));
    const KernelMatrix kernel = build_kernel(g.factors, g.w);
    const ComplexVector s = injections_with_xi(rng, kernel, uniform(rng, 0.01, 0.24));
    const SolveResult fp = solve_fixed_point(g.factors, g.w, s, g.w.w, {.tol = 1e-12});
    const NewtonResult nr = solve_newton(g.sys, s, g.w.w);
    REQUIRE(fp.converged);
    REQUIRE(nr.converged);
    CHECK(max_abs(ComplexVector(fp.v - nr.v)) < 1e-6);
  }
}

TEST_CASE("singular Jacobian is an error") {
  const AdmittanceSystem sys = build_admittance(single_bus_network({1.0, -1.0}));
  CHECK_THROWS_AS(solve_newton(sys, ComplexVector::Constant(1, Complex(1.0, 0.0)),
                               ComplexVector::Constant(1, Complex(0.5, 0.0))),
                  NumericalError);
}
