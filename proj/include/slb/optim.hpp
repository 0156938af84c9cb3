#pragma once

#include <functional>
#include <span>
#include <vector>

namespace slb {

// Golden-section minimization of a unimodal function on [lo, hi].  Stops when
// the bracket width drops below rel_tol * (1 + |x|).
struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

GoldenResult golden_minimize(const std::function<double(double)>& f, double lo,
                             double hi, double rel_tol = 1e-10,
                             int max_iter = 400);

// Doubles hi from `start` until deriv(hi) >= 0.  Used to bracket the interior
// minimizer of a convex objective whose derivative increases to a positive
// limit.  unbounded is set when the cap is reached with the derivative still
// negative.
struct Bracket {
  double hi = 0.0;
  bool degenerate_at_zero = false;  // derivative already >= 0 at 0
  bool unbounded = false;
  int evaluations = 0;
};

Bracket bracket_sign_change(const std::function<double(double)>& deriv,
                            double start = 1.0, double cap = 1e18);

// Projected gradient descent over the nonnegative orthant with a
// Barzilai-Borwein step and Armijo backtracking.  Converges on smooth convex
// objectives; the KKT residual treats coordinates at the boundary one-sidedly.
struct ProjectedResult {
  std::vector<double> x;
  double fx = 0.0;
  double kkt = 0.0;
  int iterations = 0;
  bool converged = false;
};

ProjectedResult projected_gradient_min(
    const std::function<double(std::span<const double>)>& value,
    const std::function<std::vector<double>(std::span<const double>)>& grad,
    std::vector<double> x0, double kkt_tol = 1e-8, int max_iter = 20000);

double kkt_residual(std::span<const double> x, std::span<const double> g,
                    double active_eps = 1e-8);

}  // namespace slb
