#include "slb/phi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slb/errors.hpp"
#include "slb/optim.hpp"

namespace slb {

namespace {

constexpr double kLn2 = std::numbers::ln2;

std::vector<double> to_nat(std::span<const double> beta_bits) {
  std::vector<double> s(beta_bits.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = beta_bits[j] * kLn2;
  return s;
}

void check_levels(const DistortionSpec& spec, std::span<const double> D) {
  if (D.size() != spec.k())
    throw DomainError("phi: level dimension must match spec");
  for (double d : D) {
    if (std::isnan(d)) throw DomainError("phi: NaN level");
  }
}

bool is_well(const WindowFunction& f) {
  return f.shape == WindowFunction::Shape::InfiniteWell;
}

}  // namespace

LogPartition log_partition(const Alphabet& alphabet, const DistortionSpec& spec,
                           std::span<const double> beta_bits) {
  const TiltedMoments m =
      tilted_moments(alphabet, spec, to_nat(beta_bits), true);
  LogPartition lp;
  lp.value = m.log_z_nat / kLn2;
  lp.gradient.resize(spec.k());
  for (std::size_t j = 0; j < spec.k(); ++j) lp.gradient[j] = -m.mean[j];
  lp.covariance = m.cov;
  return lp;
}

PhiResult phi(const Alphabet& alphabet, const DistortionSpec& spec,
              std::span<const double> D) {
  if (!spec.single_letter())
    throw DomainError("phi: spec must be single-letter");
  check_levels(spec, D);
  const std::size_t k = spec.k();

  PhiResult r;
  r.beta_star.assign(k, 0.0);
  r.active_mask.assign(k, false);

  if (k == 1) {
    const DistortionFloor floor = distortion_floor(alphabet, spec, 0);
    if (D[0] < floor.min_value - 1e-12)
      throw DivergenceError(
          "phi: level below the distortion floor of '" +
          spec.functions[0].label + "'");
    if (D[0] <= floor.min_value + 1e-12) {
      // Infimum reached in the beta -> infinity limit.  Finite only when the
      // floor carries point mass, i.e. on discrete alphabets.
      if (!alphabet.is_discrete())
        throw DivergenceError(
            "phi: level at the distortion floor of a continuous alphabet");
      r.phi = std::log2(floor.weight_at_min);
      r.beta_star[0] = 1e18;
      r.active_mask[0] = true;
      r.at_floor = true;
      r.converged = true;
      return r;
    }

    auto objective = [&](double beta) {
      const double s = beta * kLn2;
      return beta * D[0] +
             log_partition_nat(alphabet, spec, std::span(&s, 1)) / kLn2;
    };
    auto derivative = [&](double beta) {
      const double s = beta * kLn2;
      const TiltedMoments m =
          tilted_moments(alphabet, spec, std::span(&s, 1), false);
      return D[0] - m.mean[0];
    };

    const Bracket b = bracket_sign_change(derivative);
    if (b.degenerate_at_zero) {
      r.phi = objective(0.0);
      r.degenerate = true;
      r.converged = true;
      return r;
    }
    if (b.unbounded)
      throw DivergenceError("phi: minimizing tilt did not bracket");
    const GoldenResult g = golden_minimize(objective, 0.0, b.hi);
    r.phi = g.fx;
    r.beta_star[0] = g.x;
    r.active_mask[0] = g.x > kActiveEps;
    r.degenerate = !r.active_mask[0];
    r.converged = g.converged;
    r.iterations = g.iterations;
    return r;
  }

  // Vector case: projected descent on F(beta) = beta.D + G(beta).
  auto value = [&](std::span<const double> beta) {
    double f = log_partition_nat(alphabet, spec, to_nat(beta)) / kLn2;
    for (std::size_t j = 0; j < k; ++j) f += beta[j] * D[j];
    return f;
  };
  auto gradient = [&](std::span<const double> beta) {
    const TiltedMoments m = tilted_moments(alphabet, spec, to_nat(beta), false);
    std::vector<double> g(k);
    for (std::size_t j = 0; j < k; ++j) g[j] = D[j] - m.mean[j];
    return g;
  };

  const ProjectedResult p =
      projected_gradient_min(value, gradient, std::vector<double>(k, 1.0));
  r.beta_star = p.x;
  r.phi = p.fx;
  r.converged = p.converged;
  r.iterations = p.iterations;
  bool any_active = false;
  for (std::size_t j = 0; j < k; ++j) {
    r.active_mask[j] = r.beta_star[j] > kActiveEps;
    any_active = any_active || r.active_mask[j];
  }
  r.degenerate = !any_active;

  // Flag near-singular covariance among active non-well constraints (the
  // duplicated/linearly dependent case).
  std::vector<std::size_t> act;
  for (std::size_t j = 0; j < k; ++j)
    if (r.active_mask[j] && !is_well(spec.functions[j])) act.push_back(j);
  if (act.size() >= 2) {
    const TiltedMoments m =
        tilted_moments(alphabet, spec, to_nat(r.beta_star), true);
    linalg::Matrix c(act.size(), std::vector<double>(act.size()));
    for (std::size_t a = 0; a < act.size(); ++a)
      for (std::size_t b = 0; b < act.size(); ++b)
        c[a][b] = m.cov[act[a]][act[b]];
    const auto eig = linalg::jacobi_eigenvalues(c);
    const double lo = eig.values.front(), hi = eig.values.back();
    if (!(lo > 1e-10 * std::max(hi, 0.0))) r.dependent_constraints = true;
  }
  return r;
}

MaxEntCheck maxent_check(const PhiResult& result, const Alphabet& alphabet,
                         const DistortionSpec& spec,
                         std::span<const double> D) {
  MaxEntCheck c;
  if (result.at_floor || result.degenerate) return c;
  c.applicable = true;
  const TiltedDensity g = make_tilted(alphabet, spec, result.beta_star);
  c.entropy_gap_bits = std::abs(g.entropy_bits() - result.phi);
  const std::vector<double> e = g.expected_distortion(spec);
  c.moment_gaps.assign(spec.k(), 0.0);
  for (std::size_t j = 0; j < spec.k(); ++j) {
    if (result.active_mask[j] && !is_well(spec.functions[j]))
      c.moment_gaps[j] = std::abs(e[j] - D[j]);
  }
  return c;
}

double distortion_rate_bound(const Alphabet& alphabet,
                             const DistortionSpec& spec, double rate_bits,
                             double h_rate_bits) {
  if (spec.k() != 1)
    throw DomainError("distortion_rate_bound: needs a single constraint");
  auto objective = [&](double gamma) {
    const double s = kLn2 / gamma;  // beta = 1/gamma in the bits convention
    const double g =
        log_partition_nat(alphabet, spec, std::span(&s, 1)) / kLn2;
    return gamma * (h_rate_bits - g - rate_bits);
  };

  // Log-spaced scan, then golden refinement of the bracketing interval.
  constexpr int kScan = 241;
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  std::vector<double> gammas(kScan);
  for (int i = 0; i < kScan; ++i) {
    gammas[i] = std::pow(10.0, -9.0 + 18.0 * i / (kScan - 1));
    const double v = objective(gammas[i]);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (best_i == kScan - 1 && best > 0.0)
    throw DivergenceError(
        "distortion_rate_bound: objective still rising at the scan edge; "
        "enlarge the alphabet truncation");
  const double lo = gammas[std::max(0, best_i - 1)];
  const double hi = gammas[std::min(kScan - 1, best_i + 1)];
  const GoldenResult g =
      golden_minimize([&](double x) { return -objective(x); }, lo, hi);
  return std::max(0.0, -g.fx);
}

Alphabet suggest_truncated_interval(const DistortionSpec& spec,
                                    std::span<const double> beta_min_bits,
                                    int node_count, QuadratureRule rule,
                                    double tail_tol) {
  if (beta_min_bits.size() != spec.k())
    throw DomainError("suggest_truncated_interval: tilt dimension mismatch");
  const std::vector<double> s = to_nat(beta_min_bits);
  double half = 1.0;
  double prev = -1.0;
  for (int round = 0; round < 64; ++round) {
    const Alphabet a =
        Alphabet::continuous_interval(-half, half, node_count, rule);
    double z;
    try {
      z = std::exp(log_partition_nat(a, spec, s));
    } catch (const DivergenceError&) {
      half *= 2.0;
      continue;
    }
    if (prev > 0.0 && z - prev <= tail_tol * z)
      return Alphabet::continuous_interval(-half, half, node_count, rule);
    prev = z;
    half *= 2.0;
  }
  throw DivergenceError(
      "suggest_truncated_interval: tilt does not confine the distortion");
}

}  // namespace slb
