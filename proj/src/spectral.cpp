#include "slb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numbers>
#include <string>

#include "slb/errors.hpp"
#include "slb/optim.hpp"
#include "slb/parallel.hpp"
#include "slb/phi.hpp"

namespace slb {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr int kMaxPowerIterations = 100000;

double tilt_factor(std::span<const double> beta, std::span<const double> rho) {
  double e = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] == 0.0) continue;
    if (std::isinf(rho[j])) return 0.0;
    e += beta[j] * rho[j];
  }
  return std::exp2(-e);
}

void check_beta(std::span<const double> beta, const DistortionSpec& spec) {
  if (beta.size() != spec.k())
    throw DomainError("operator: tilt dimension must match the spec");
  for (double b : beta)
    if (!(b >= 0.0)) throw DomainError("operator: tilts must be nonnegative");
}

std::uint64_t ipow(std::size_t base, int exp) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

struct PowerResult {
  double lambda = 0.0;
  std::vector<double> vec;
  int iterations = 0;
  double residual = 0.0;
};

// Power iteration on M (or its transpose) with a small diagonal shift; the
// shift leaves eigenvectors alone but makes the iteration aperiodic.  It is
// sized from the running eigenvalue estimate: any fixed fraction of a norm
// bound can dwarf the spectral radius and stall the iteration.
PowerResult power_iterate(const std::vector<double>& a, std::size_t nd,
                          bool transpose, int jobs,
                          const std::vector<double>* start = nullptr) {
  std::vector<double> x(nd, 1.0), y(nd, 0.0);
  if (start != nullptr && start->size() == nd) {
    double sup = 0.0, mass = 0.0;
    for (double v : *start) {
      sup = std::max(sup, v);
      mass += std::max(v, 0.0);
    }
    if (std::isfinite(sup) && sup > 0.0 && mass > 0.0)
      for (std::size_t i = 0; i < nd; ++i)
        x[i] = std::max((*start)[i], 0.0) / sup;
  }

  const auto matvec = [&](const std::vector<double>& in,
                          std::vector<double>& out) {
    parallel_for(nd, jobs, [&](std::size_t i) {
      double s = 0.0;
      if (transpose)
        for (std::size_t j = 0; j < nd; ++j) s += a[j * nd + i] * in[j];
      else
        for (std::size_t j = 0; j < nd; ++j) s += a[i * nd + j] * in[j];
      out[i] = s;
    });
  };

  PowerResult res;
  for (int it = 1; it <= kMaxPowerIterations; ++it) {
    matvec(x, y);
    double xy = 0.0, xx = 0.0;
    for (std::size_t i = 0; i < nd; ++i) {
      xy += x[i] * y[i];
      xx += x[i] * x[i];
    }
    const double lambda = xy / xx;
    if (!std::isfinite(lambda) || !(lambda > 0.0))
      throw ConvergenceError("power iteration: eigenvalue estimate collapsed");
    double resid = 0.0;
    for (std::size_t i = 0; i < nd; ++i)
      resid = std::max(resid, std::abs(y[i] - lambda * x[i]));
    resid /= lambda;
    res.lambda = lambda;
    res.iterations = it;
    res.residual = resid;
    if (resid <= kResidualTol) {
      res.vec = x;
      return res;
    }
    const double shift = 0.05 * lambda;
    double sup = 0.0;
    for (std::size_t i = 0; i < nd; ++i) {
      x[i] = y[i] + shift * x[i];
      sup = std::max(sup, std::abs(x[i]));
    }
    for (std::size_t i = 0; i < nd; ++i) x[i] /= sup;
  }
  throw ConvergenceError("power iteration: residual " +
                         std::to_string(res.residual) + " after " +
                         std::to_string(kMaxPowerIterations) + " iterations");
}

void check_irreducible(const std::vector<double>& a, std::size_t nd) {
  const auto bfs = [&](bool transpose) {
    std::vector<char> seen(nd, 0);
    std::vector<std::size_t> stack = {0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < nd; ++j) {
        const double v = transpose ? a[j * nd + i] : a[i * nd + j];
        if (v > 0.0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    return seen;
  };
  for (bool transpose : {false, true}) {
    const std::vector<char> seen = bfs(transpose);
    std::size_t missing = 0, first = 0;
    for (std::size_t i = 0; i < nd; ++i)
      if (!seen[i]) {
        if (missing == 0) first = i;
        ++missing;
      }
    if (missing > 0)
      throw ReducibleOperatorError(
          "operator support is not strongly connected: state " +
          std::to_string(first) + " (and " + std::to_string(missing - 1) +
          " more) " +
          (transpose ? "cannot reach state 0" : "unreachable from state 0"));
  }
}

}  // namespace

TransferOperator build_operator(const Alphabet& alphabet,
                                const DistortionSpec& spec,
                                std::span<const double> beta_bits,
                                std::size_t budget) {
  check_beta(beta_bits, spec);
  const int m = spec.common_window();
  const std::size_t r = alphabet.size();
  const auto& nodes = alphabet.nodes();
  const auto& weights = alphabet.weights();

  TransferOperator op;
  op.m = m;
  op.continuous = !alphabet.is_discrete();
  op.beta.assign(beta_bits.begin(), beta_bits.end());

  if (m == 1) {
    op.state_dim = 1;
    op.rho.assign(spec.k(), std::vector<double>(r));
    op.base_weight.resize(r);
    for (std::size_t z = 0; z < r; ++z) {
      op.base_weight[z] = weights[z];
      for (std::size_t j = 0; j < spec.k(); ++j)
        op.rho[j][z] = spec.functions[j].eval(std::span(&nodes[z], 1));
    }
    op.entries.assign(1, 0.0);
    retilt_operator(op, beta_bits);
    return op;
  }

  const std::uint64_t dim = ipow(r, m - 1);
  if (dim > budget)
    throw BudgetError("build_operator: state dimension " +
                      std::to_string(dim) + " exceeds the budget of " +
                      std::to_string(budget));
  const std::size_t nd = static_cast<std::size_t>(dim);
  op.state_dim = nd;
  op.entries.assign(nd * nd, 0.0);
  op.base_weight.assign(nd * nd, 0.0);
  op.rho.assign(spec.k(), std::vector<double>(nd * nd, 0.0));

  const std::uint64_t tail = ipow(r, m - 2);  // r^{m-2}
  std::vector<double> window(m);
  std::vector<std::size_t> digits(m - 1);
  for (std::size_t i = 0; i < nd; ++i) {
    std::uint64_t rest = i;
    for (int t = m - 2; t >= 0; --t) {
      digits[t] = rest % r;
      rest /= r;
    }
    for (int t = 0; t < m - 1; ++t) window[t] = nodes[digits[t]];
    for (std::size_t c = 0; c < r; ++c) {
      window[m - 1] = nodes[c];
      const std::size_t jcol =
          static_cast<std::size_t>((i % tail) * r + c);
      const std::size_t e = i * nd + jcol;
      op.base_weight[e] = std::sqrt(weights[digits[0]] * weights[c]);
      for (std::size_t j = 0; j < spec.k(); ++j) {
        const int mj = spec.functions[j].window;
        // Sub-window components are averaged over every placement inside the
        // window.  Cycle products are unchanged (every placement is the
        // trailing one somewhere along a cycle), so this is a diagonal
        // similarity: same spectrum, but balanced entries -- symmetric for
        // symmetric windows -- instead of rows spanning wild scales.
        double acc = 0.0;
        for (int p = 0; p + mj <= m; ++p)
          acc += spec.functions[j].eval(
              std::span(window.data() + p, std::size_t(mj)));
        op.rho[j][e] = acc / double(m - mj + 1);
      }
    }
  }
  retilt_operator(op, beta_bits);
  return op;
}

void retilt_operator(TransferOperator& op, std::span<const double> beta_bits) {
  if (beta_bits.size() != op.rho.size())
    throw DomainError("retilt_operator: tilt dimension changed");
  for (double b : beta_bits)
    if (!(b >= 0.0))
      throw DomainError("retilt_operator: tilts must be nonnegative");
  op.beta.assign(beta_bits.begin(), beta_bits.end());
  const std::size_t k = op.rho.size();
  std::vector<double> rho(k);
  if (op.m == 1) {
    double s = 0.0;
    for (std::size_t z = 0; z < op.base_weight.size(); ++z) {
      for (std::size_t j = 0; j < k; ++j) rho[j] = op.rho[j][z];
      s += op.base_weight[z] * tilt_factor(beta_bits, rho);
    }
    op.entries[0] = s;
    return;
  }
  for (std::size_t e = 0; e < op.entries.size(); ++e) {
    if (op.base_weight[e] == 0.0) {
      op.entries[e] = 0.0;
      continue;
    }
    for (std::size_t j = 0; j < k; ++j) rho[j] = op.rho[j][e];
    op.entries[e] = op.base_weight[e] * tilt_factor(beta_bits, rho);
  }
}

SpectralResult spectral_radius(const TransferOperator& op, int jobs) {
  SpectralResult out;
  if (op.state_dim == 1) {
    if (!(op.entries[0] > 0.0))
      throw ReducibleOperatorError("operator support is empty");
    out.lambda = op.entries[0];
    out.log_lambda_bits = std::log2(out.lambda);
    out.right_vector = {1.0};
    out.iterations = 1;
    out.residual = 0.0;
    return out;
  }
  check_irreducible(op.entries, op.state_dim);
  PowerResult res = power_iterate(op.entries, op.state_dim, false, jobs);
  out.lambda = res.lambda;
  out.log_lambda_bits = std::log2(res.lambda);
  out.right_vector = std::move(res.vec);
  double sup = 0.0;
  for (double v : out.right_vector) sup = std::max(sup, std::abs(v));
  for (double& v : out.right_vector) v /= sup;
  out.iterations = res.iterations;
  out.residual = res.residual;

  // Symmetric operators get an independent Rayleigh-quotient ascent step:
  // with M + lambda*I positive semidefinite the quotient cannot decrease,
  // and it must reproduce the power-iteration eigenvalue.
  const std::size_t nd = op.state_dim;
  double max_entry = 0.0, asym = 0.0;
  for (std::size_t i = 0; i < nd; ++i)
    for (std::size_t j = i; j < nd; ++j) {
      max_entry = std::max(max_entry, std::abs(op.entries[i * nd + j]));
      asym = std::max(
          asym, std::abs(op.entries[i * nd + j] - op.entries[j * nd + i]));
    }
  if (asym <= 1e-12 * max_entry) {
    const auto apply = [&](const std::vector<double>& in,
                           std::vector<double>& o) {
      for (std::size_t i = 0; i < nd; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < nd; ++j) s += op.entries[i * nd + j] * in[j];
        o[i] = s;
      }
    };
    std::vector<double> mv(nd), v2(nd), mv2(nd);
    apply(out.right_vector, mv);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < nd; ++i) {
      num += out.right_vector[i] * mv[i];
      den += out.right_vector[i] * out.right_vector[i];
    }
    const double rq = num / den;
    for (std::size_t i = 0; i < nd; ++i)
      v2[i] = mv[i] + out.lambda * out.right_vector[i];
    apply(v2, mv2);
    double num2 = 0.0, den2 = 0.0;
    for (std::size_t i = 0; i < nd; ++i) {
      num2 += v2[i] * mv2[i];
      den2 += v2[i] * v2[i];
    }
    const double rq2 = num2 / den2;
    const double scale = std::max(1.0, std::abs(out.lambda));
    if (rq2 < rq - 1e-12 * scale || std::abs(rq2 - out.lambda) > 1e-9 * scale)
      throw ConvergenceError("rayleigh cross-check rejected the eigenvalue");
  }
  return out;
}

namespace {

// Objective log2 lambda(beta) + beta.D and its eigenvector-form gradient
// d log2 lambda / d beta_j = -u.(rho_j o M).v / (lambda u.v).
struct Objective {
  TransferOperator* op;
  const std::vector<double>* levels;
  int jobs;
  // Converged eigenvectors carried between tilts: nearby tilts have nearby
  // eigenvectors, so restarting from the last one cuts the iteration count.
  mutable std::vector<double> warm_right, warm_left;

  double value(std::span<const double> beta) const {
    retilt_operator(*op, beta);
    for (double e : op->entries)
      if (!std::isfinite(e)) return 1e300;  // sign-indefinite window blew up
    const std::size_t nd = op->state_dim;
    try {
      check_irreducible(op->entries, nd);
      const PowerResult pr =
          power_iterate(op->entries, nd, false, jobs,
                        warm_right.size() == nd ? &warm_right : nullptr);
      warm_right = pr.vec;
      double v = std::log2(pr.lambda);
      for (std::size_t j = 0; j < beta.size(); ++j)
        v += beta[j] * (*levels)[j];
      return v;
    } catch (const ReducibleOperatorError&) {
      return 1e300;  // tilt so strong the support underflowed: out of region
    } catch (const ConvergenceError&) {
      return 1e300;  // radius not certifiable here: steer the search away
    }
  }

  std::vector<double> gradient(std::span<const double> beta) const {
    retilt_operator(*op, beta);
    const std::size_t nd = op->state_dim;
    std::vector<double> g(beta.size());
    if (nd == 1) {
      const double z = op->entries[0];
      for (std::size_t j = 0; j < beta.size(); ++j) {
        double acc = 0.0;
        std::vector<double> rho(beta.size());
        for (std::size_t zix = 0; zix < op->base_weight.size(); ++zix) {
          for (std::size_t jj = 0; jj < beta.size(); ++jj)
            rho[jj] = op->rho[jj][zix];
          const double w = op->base_weight[zix] * tilt_factor(beta, rho);
          if (w > 0.0) acc += op->rho[j][zix] * w;
        }
        g[j] = (*levels)[j] - acc / z;
      }
      return g;
    }
    const PowerResult right =
        power_iterate(op->entries, nd, false, jobs,
                      warm_right.size() == nd ? &warm_right : nullptr);
    warm_right = right.vec;
    const PowerResult left =
        power_iterate(op->entries, nd, true, jobs,
                      warm_left.size() == nd ? &warm_left : nullptr);
    warm_left = left.vec;
    double uv = 0.0;
    for (std::size_t i = 0; i < nd; ++i) uv += left.vec[i] * right.vec[i];
    for (std::size_t j = 0; j < beta.size(); ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < nd; ++i) {
        double row = 0.0;
        for (std::size_t c = 0; c < nd; ++c) {
          const double e = op->entries[i * nd + c];
          if (e > 0.0) row += op->rho[j][i * nd + c] * e * right.vec[c];
        }
        acc += left.vec[i] * row;
      }
      g[j] = (*levels)[j] - acc / (right.lambda * uv);
    }
    return g;
  }
};

}  // namespace

SlidingBound sliding_slb(const Alphabet& alphabet, const DistortionSpec& spec,
                         double h_rate_bits, int jobs) {
  SlidingBound out;
  if (spec.single_letter()) {
    const PhiResult pr = phi(alphabet, spec, spec.levels);
    out.objective_bits = pr.phi;
    out.value_bits = h_rate_bits - pr.phi;
    out.beta_star = pr.beta_star;
    out.log_lambda_bits = pr.phi;
    for (std::size_t j = 0; j < spec.k(); ++j)
      out.log_lambda_bits -= pr.beta_star[j] * spec.levels[j];
    out.iterations = pr.iterations;
    return out;
  }

  TransferOperator op =
      build_operator(alphabet, spec, std::vector<double>(spec.k(), 0.0));
  Objective obj{&op, &spec.levels, jobs, {}, {}};

  const ProjectedResult pg = projected_gradient_min(
      [&](std::span<const double> b) { return obj.value(b); },
      [&](std::span<const double> b) { return obj.gradient(b); },
      std::vector<double>(spec.k(), 1.0), 1e-8, 2000);

  // Coarse grid guard: descent assumes convexity, so verify against a scan
  // and fall back when the scan wins.
  static const double kGridNodes[] = {0.0, 0.001, 0.01, 0.1, 0.25, 0.5, 1.0,
                                      2.0,  4.0,   8.0,  16.0, 32.0, 64.0};
  const std::size_t gk = std::size(kGridNodes);
  const std::size_t k = spec.k();
  std::uint64_t combos = 1;
  for (std::size_t j = 0; j < k && combos <= 4096; ++j) combos *= gk;
  std::vector<double> best_grid_beta(k, 0.0);
  double best_grid = std::numeric_limits<double>::infinity();
  if (combos <= 4096) {
    std::vector<double> b(k);
    for (std::uint64_t idx = 0; idx < combos; ++idx) {
      std::uint64_t rest = idx;
      for (std::size_t j = 0; j < k; ++j) {
        b[j] = kGridNodes[rest % gk];
        rest /= gk;
      }
      const double v = obj.value(b);
      if (v < best_grid) {
        best_grid = v;
        best_grid_beta = b;
      }
    }
  }

  double obj_value = pg.fx;
  std::vector<double> beta_star = pg.x;
  if (best_grid < obj_value - 1e-9) {
    out.grid_fallback = true;
    beta_star = best_grid_beta;
    obj_value = best_grid;
    // Cyclic golden polish around the winning node.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        const double center = beta_star[j];
        const double lo = std::max(0.0, center * 0.25 - 1e-3);
        const double hi = center * 4.0 + 1.0;
        std::vector<double> probe = beta_star;
        const GoldenResult g = golden_minimize(
            [&](double t) {
              probe[j] = t;
              return obj.value(probe);
            },
            lo, hi, 1e-10);
        if (g.fx < obj_value) {
          beta_star[j] = g.x;
          obj_value = g.fx;
        }
      }
    }
  }
  if (!(obj_value < 1e299))
    throw DivergenceError("sliding_slb: objective diverged at every tilt");

  retilt_operator(op, beta_star);
  const SpectralResult sr = spectral_radius(op, jobs);
  out.objective_bits = obj_value;
  out.value_bits = h_rate_bits - obj_value;
  out.beta_star = beta_star;
  out.log_lambda_bits = sr.log_lambda_bits;
  out.iterations = pg.iterations;

  if (op.continuous) {
    const Alphabet fine = Alphabet::continuous_interval(
        alphabet.lower(), alphabet.upper(), alphabet.node_count() * 2 - 1,
        alphabet.rule());
    const TransferOperator fine_op = build_operator(fine, spec, beta_star);
    const SpectralResult fine_sr = spectral_radius(fine_op, jobs);
    if (std::abs(fine_sr.log_lambda_bits - sr.log_lambda_bits) > 1e-4)
      out.under_resolved = true;
  }
  return out;
}

double gaussian_example_check(double D, double theta) {
  if (!(D > 0.0))
    throw DomainError("gaussian_example_check: D must be positive");
  if (!(theta >= 0.0 && theta < 1.0))
    throw DomainError("gaussian_example_check: theta must lie in [0, 1)");
  const int nodes = theta >= 0.8 ? 601 : 301;
  const Alphabet alphabet = Alphabet::continuous_interval(
      -8.0, 8.0, nodes, QuadratureRule::CompositeSimpson);
  const DistortionSpec spec =
      make_spec({square_distortion(), neg_correlation()}, {D, -theta * D});
  const SlidingBound bound = sliding_slb(alphabet, spec, 0.0);
  const double closed = 0.5 * std::log2(2.0 * std::numbers::pi *
                                        std::numbers::e * D *
                                        (1.0 - theta * theta));
  return std::abs(bound.objective_bits - closed);
}

}  // namespace slb
