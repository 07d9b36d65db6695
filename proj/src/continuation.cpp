#include "loadflow/continuation.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace loadflow {

RayConstants ray_constants(const KernelMatrix& kernel, const ComplexVector& direction,
                           std::span<const double> p_set) {
  RayConstants rc;
  rc.xi_direction = xi(kernel, direction);
  const PriorCheck prior = check_prior_conditions(kernel, direction, p_set);
  rc.plain = prior.plain;
  rc.scaled = prior.scaled;
  return rc;
}

double bisect_boundary(const std::function<bool(double)>& condition, double lo, double hi,
                       double tol) {
  if (!(lo < hi) || !(tol > 0.0)) {
    throw std::invalid_argument("bisect_boundary: need lo < hi and tol > 0");
  }
  const bool at_lo = condition(lo);
  if (at_lo == condition(hi)) {
    throw std::invalid_argument("bisect_boundary: condition does not change over the bracket");
  }
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (condition(mid) == at_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

bool any_below_quarter(const std::vector<PriorConditionDetail>& details, double scale) {
  for (const auto& d : details) {
    if (scale * d.product < 0.25) return true;
  }
  return false;
}

// Boundary of a predicate that holds at kappa = 0 and fails beyond some
// point; nullopt when it still holds at the end of the grid.
std::optional<double> falling_edge(const std::function<bool(double)>& pred,
                                   const std::vector<double>& grid,
                                   const std::vector<bool>& mask, double tol) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (mask[i - 1] && !mask[i]) return bisect_boundary(pred, grid[i - 1], grid[i], tol);
  }
  return std::nullopt;
}

}  // namespace

SweepResult sweep(const PreparedGrid& grid, const KernelMatrix& kernel,
                  const ComplexVector& injections,
                  const std::optional<OperatingPoint>& known_state, double kappa_max, int steps,
                  const SweepOptions& options) {
  if (steps < 2) throw std::invalid_argument("sweep: need at least two grid points");
  if (!(kappa_max > 0.0)) throw std::invalid_argument("sweep: kappa_max must be positive");

  const double base = grid.net.bases.power_mva;
  const ComplexVector& source = known_state ? known_state->s : injections;
  const double source_norm = source.cwiseAbs().sum();
  if (!(source_norm > 0.0)) {
    throw std::invalid_argument("sweep: injection ray is zero");
  }

  SweepResult result;
  result.direction = source / source_norm;
  const RayConstants rc = ray_constants(kernel, result.direction, options.p_set);

  auto corollary = [&](double kappa) {
    return evaluate_corollary(kappa / base * rc.xi_direction).ok;
  };
  auto plain = [&](double kappa) { return any_below_quarter(rc.plain, kappa / base); };
  auto scaled = [&](double kappa) { return any_below_quarter(rc.scaled, kappa / base); };

  std::function<bool(double)> theorem = [](double) { return false; };
  double xi_hat = 0.0;
  double umin = 0.0;
  if (known_state) {
    result.kappa_hat = source_norm * base;
    xi_hat = xi(kernel, known_state->s);
    umin = u_min(known_state->v, grid.w);
    theorem = [&, kappa_hat = *result.kappa_hat](double kappa) {
      const double xi_delta = std::abs(kappa - kappa_hat) / base * rc.xi_direction;
      return evaluate_theorem(xi_hat, xi_delta, umin).ok;
    };
  }

  const double h = kappa_max / (steps - 1);
  for (int i = 0; i < steps; ++i) {
    const double kappa = i == steps - 1 ? kappa_max : i * h;
    result.kappa.push_back(kappa);
    result.theorem.push_back(theorem(kappa));
    result.corollary.push_back(corollary(kappa));
    result.scaled_prior.push_back(scaled(kappa));
    result.plain_prior.push_back(plain(kappa));

    bool converged = false;
    if (options.run_solver) {
      const ComplexVector s = (kappa / base) * result.direction;
      try {
        converged =
            solve_fixed_point(grid.factors, grid.w, s, grid.w.w, options.solver).converged;
      } catch (const VoltageCollapse&) {
        converged = false;
      }
    }
    result.fp_converged.push_back(converged);
  }

  const double tol = options.bisection_rel_tol * kappa_max;
  result.boundaries.corollary = falling_edge(corollary, result.kappa, result.corollary, tol);
  result.boundaries.scaled_prior = falling_edge(scaled, result.kappa, result.scaled_prior, tol);
  result.boundaries.plain_prior = falling_edge(plain, result.kappa, result.plain_prior, tol);

  if (known_state && theorem(*result.kappa_hat)) {
    const double kappa_hat = *result.kappa_hat;
    if (!theorem(0.0)) {
      const double lower = bisect_boundary(theorem, 0.0, kappa_hat, tol);
      if (lower <= kappa_max) result.boundaries.theorem_lower = lower;
    }
    if (kappa_hat < kappa_max && !theorem(kappa_max)) {
      result.boundaries.theorem_upper = bisect_boundary(theorem, kappa_hat, kappa_max, tol);
    }
  }
  return result;
}

void write_sweep_table(std::ostream& out, const SweepResult& result) {
  out << "kappa,theorem,corollary,improved,prior,fp_converged\n";
  char buf[64];
  for (std::size_t i = 0; i < result.kappa.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", result.kappa[i]);
    out << buf << ',' << int(result.theorem[i]) << ',' << int(result.corollary[i]) << ','
        << int(result.scaled_prior[i]) << ',' << int(result.plain_prior[i]) << ','
        << int(result.fp_converged[i]) << '\n';
  }
}

}  // namespace loadflow
