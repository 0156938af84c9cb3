#include "slb/optim.hpp"

#include <algorithm>
#include <cmath>

#include "slb/errors.hpp"

namespace slb {

GoldenResult golden_minimize(const std::function<double(double)>& f, double lo,
                             double hi, double rel_tol, int max_iter) {
  if (!(lo <= hi)) throw DomainError("golden: empty interval");
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  GoldenResult r;
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    if (b - a <= rel_tol * (1.0 + std::abs(a) + std::abs(b))) {
      r.converged = true;
      break;
    }
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  r.x = 0.5 * (a + b);
  r.fx = f(r.x);
  return r;
}

Bracket bracket_sign_change(const std::function<double(double)>& deriv,
                            double start, double cap) {
  Bracket b;
  ++b.evaluations;
  if (deriv(0.0) >= 0.0) {
    b.degenerate_at_zero = true;
    return b;
  }
  double hi = start;
  while (hi <= cap) {
    ++b.evaluations;
    if (deriv(hi) >= 0.0) {
      b.hi = hi;
      return b;
    }
    hi *= 2.0;
  }
  b.unbounded = true;
  b.hi = cap;
  return b;
}

double kkt_residual(std::span<const double> x, std::span<const double> g,
                    double active_eps) {
  double r = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double rj =
        x[j] > active_eps ? std::abs(g[j]) : std::max(0.0, -g[j]);
    r = std::max(r, rj);
  }
  return r;
}

ProjectedResult projected_gradient_min(
    const std::function<double(std::span<const double>)>& value,
    const std::function<std::vector<double>(std::span<const double>)>& grad,
    std::vector<double> x0, double kkt_tol, int max_iter) {
  const std::size_t k = x0.size();
  for (double& v : x0) v = std::max(0.0, v);

  std::vector<double> x = std::move(x0);
  double fx = value(x);
  std::vector<double> g = grad(x);
  std::vector<double> x_prev, g_prev;
  double step = 1.0;

  ProjectedResult r;
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    r.kkt = kkt_residual(x, g);
    if (r.kkt <= kkt_tol) {
      r.converged = true;
      break;
    }
    if (!x_prev.empty()) {
      // Barzilai-Borwein step, safeguarded.
      double sy = 0.0, yy = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double sj = x[j] - x_prev[j];
        const double yj = g[j] - g_prev[j];
        sy += sj * yj;
        yy += yj * yj;
      }
      if (sy > 0.0 && yy > 0.0) step = std::clamp(sy / yy, 1e-12, 1e12);
    }

    std::vector<double> xn(k);
    double t = step;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      double gd = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        xn[j] = std::max(0.0, x[j] - t * g[j]);
        gd += g[j] * (xn[j] - x[j]);
      }
      if (gd == 0.0) break;  // projection pinned every coordinate
      const double fn = value(xn);
      if (fn <= fx + 1e-4 * gd) {
        x_prev = x;
        g_prev = g;
        x = xn;
        fx = fn;
        g = grad(x);
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;  // stalled; KKT reported below
  }
  r.kkt = kkt_residual(x, g);
  r.converged = r.kkt <= kkt_tol;
  r.x = std::move(x);
  r.fx = fx;
  return r;
}

}  // namespace slb
