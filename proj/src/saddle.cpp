#include "slb/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "slb/errors.hpp"
#include "slb/optim.hpp"
#include "slb/parallel.hpp"
#include "slb/partition.hpp"

namespace slb {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr std::int64_t kMcChunk = 4096;

double log2_sum_exp2(const std::vector<double>& terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double t : terms) acc += std::exp2(t - m);
  return m + std::log2(acc);
}

double log2_binomial(std::int64_t n, std::int64_t k) {
  return (std::lgamma(double(n + 1)) - std::lgamma(double(k + 1)) -
          std::lgamma(double(n - k + 1))) /
         kLn2;
}

bool is_well(const WindowFunction& f) {
  return f.shape == WindowFunction::Shape::InfiniteWell;
}

double f_value_at(const Alphabet& alphabet, const DistortionSpec& spec,
                  std::span<const double> D, std::span<const double> s) {
  double v = log_partition_nat(alphabet, spec, s);
  for (std::size_t j = 0; j < s.size(); ++j) v += s[j] * D[j];
  return v;
}

// Uniform double in [0,1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution mapping.
double unit_double(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double q_function(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

FEval f_eval(const Alphabet& alphabet, const DistortionSpec& spec,
             std::span<const double> s_nat) {
  if (s_nat.size() != spec.k()) throw DomainError("f_eval: tilt dimension");
  const TiltedMoments m = tilted_moments(alphabet, spec, s_nat, true);
  FEval out;
  out.value_nats = m.log_z_nat;
  out.gradient.resize(spec.k());
  for (std::size_t j = 0; j < spec.k(); ++j) {
    out.value_nats += s_nat[j] * spec.levels[j];
    out.gradient[j] = spec.levels[j] - m.mean[j];
  }
  out.hessian = m.cov;
  return out;
}

SaddleResult find_saddle(const Alphabet& alphabet, const DistortionSpec& spec,
                         std::span<const double> D) {
  if (!spec.single_letter())
    throw DomainError("find_saddle: spec must be single-letter");
  if (D.size() != spec.k()) throw DomainError("find_saddle: level dimension");
  const std::size_t k = spec.k();

  SaddleResult r;
  r.s_star.assign(k, kLn2);
  r.active.assign(k, false);
  r.flat.assign(k, false);
  std::vector<bool> pruned(k, false);

  std::size_t curvature_count = 0;
  for (std::size_t j = 0; j < k; ++j)
    if (!is_well(spec.functions[j])) ++curvature_count;
  if (curvature_count == 0)
    throw DegenerateError("find_saddle: no constraint carries curvature");

  double max_level = 1.0;
  for (double d : D) max_level = std::max(max_level, std::abs(d));
  const double grad_tol = 1e-10 * max_level;

  if (k == 1) {
    auto deriv = [&](double s) {
      const TiltedMoments m =
          tilted_moments(alphabet, spec, std::span(&s, 1), false);
      return D[0] - m.mean[0];
    };
    const Bracket b = bracket_sign_change(deriv);
    r.iterations = b.evaluations;
    if (b.degenerate_at_zero) {
      throw DegenerateError(
          "find_saddle: the level exceeds the untilted mean; no constraint "
          "bites");
    }
    if (b.unbounded)
      throw DivergenceError(
          "find_saddle: no interior saddle (level at or below the floor)");
    const GoldenResult g = golden_minimize(
        [&](double s) { return f_value_at(alphabet, spec, D, {&s, 1}); }, 0.0,
        b.hi);
    r.s_star[0] = std::max(g.x, kActiveEps * 2);
    r.iterations += g.iterations;
  } else {
    auto value = [&](std::span<const double> s) {
      return f_value_at(alphabet, spec, D, s);
    };
    auto gradient = [&](std::span<const double> s) {
      const TiltedMoments m = tilted_moments(alphabet, spec, s, false);
      std::vector<double> g(k);
      for (std::size_t j = 0; j < k; ++j) g[j] = D[j] - m.mean[j];
      return g;
    };
    const ProjectedResult p =
        projected_gradient_min(value, gradient, r.s_star, 1e-8);
    r.s_star = p.x;
    r.iterations = p.iterations;
  }

  for (std::size_t j = 0; j < k; ++j) {
    if (is_well(spec.functions[j])) {
      r.flat[j] = r.s_star[j] > kActiveEps;
      if (!r.flat[j]) pruned[j] = true;
    } else if (r.s_star[j] <= kActiveEps) {
      pruned[j] = true;
      r.s_star[j] = 0.0;
    }
  }

  // Newton polish on the surviving coordinates; prunes on boundary crossing.
  for (int round = 0; round < 60; ++round) {
    std::vector<std::size_t> act;
    for (std::size_t j = 0; j < k; ++j)
      if (!pruned[j] && !r.flat[j]) act.push_back(j);
    if (act.empty()) break;
    const TiltedMoments m = tilted_moments(alphabet, spec, r.s_star, true);
    std::vector<double> g(act.size());
    double gmax = 0.0;
    for (std::size_t a = 0; a < act.size(); ++a) {
      g[a] = D[act[a]] - m.mean[act[a]];
      gmax = std::max(gmax, std::abs(g[a]));
    }
    if (gmax <= grad_tol) break;
    linalg::Matrix h(act.size(), std::vector<double>(act.size()));
    for (std::size_t a = 0; a < act.size(); ++a)
      for (std::size_t b = 0; b < act.size(); ++b)
        h[a][b] = m.cov[act[a]][act[b]];
    const auto eig = linalg::jacobi_eigenvalues(h);
    if (!(eig.values.front() > 1e-12 * std::max(eig.values.back(), 1e-300)))
      break;  // rank-deficient: leave to the dependence flag below
    std::vector<double> delta;
    try {
      delta = linalg::solve(h, g);
    } catch (const SingularHessianError&) {
      break;
    }
    bool pruned_new = false;
    for (std::size_t a = 0; a < act.size(); ++a) {
      r.s_star[act[a]] -= delta[a];
      if (r.s_star[act[a]] <= kActiveEps) {
        r.s_star[act[a]] = 0.0;
        pruned[act[a]] = true;
        pruned_new = true;
      }
    }
    ++r.iterations;
    if (pruned_new) continue;
  }

  std::vector<std::size_t> act;
  for (std::size_t j = 0; j < k; ++j) {
    r.active[j] = !pruned[j] && !r.flat[j];
    if (r.active[j]) act.push_back(j);
  }
  if (act.empty() && std::none_of(r.flat.begin(), r.flat.end(),
                                  [](bool f) { return f; }))
    throw DegenerateError("find_saddle: every coordinate pruned; no "
                          "constraint bites");
  if (act.empty())
    throw DegenerateError("find_saddle: only flat well coordinates remain");

  const TiltedMoments m = tilted_moments(alphabet, spec, r.s_star, true);
  r.f_value_nats = m.log_z_nat;
  for (std::size_t j = 0; j < k; ++j)
    r.f_value_nats += r.s_star[j] * D[j];
  linalg::Matrix h(act.size(), std::vector<double>(act.size()));
  for (std::size_t a = 0; a < act.size(); ++a)
    for (std::size_t b = 0; b < act.size(); ++b)
      h[a][b] = m.cov[act[a]][act[b]];
  const auto eig = linalg::jacobi_eigenvalues(h);
  r.effective_dim = static_cast<int>(act.size());
  r.hess_det = 1.0;
  for (double v : eig.values) r.hess_det *= v;
  r.dependent =
      !(eig.values.front() > 1e-10 * std::max(eig.values.back(), 0.0));
  return r;
}

const char* method_name(VolumeEstimate::Method method) {
  switch (method) {
    case VolumeEstimate::Method::ExactL1: return "exact-l1";
    case VolumeEstimate::Method::ExactL2: return "exact-l2";
    case VolumeEstimate::Method::ExactHamming: return "exact-hamming";
    case VolumeEstimate::Method::MonteCarlo: return "monte-carlo";
    case VolumeEstimate::Method::Chernoff: return "chernoff";
    case VolumeEstimate::Method::Saddlepoint: return "saddlepoint";
  }
  return "unknown";
}

VolumeEstimate log_volume_saddle(std::int64_t n, SaddleResult& saddle,
                                 const Alphabet& alphabet) {
  if (n <= 0) throw DomainError("log_volume_saddle: n must be positive");
  if (saddle.effective_dim < 1)
    throw DegenerateError("log_volume_saddle: no active constraint");
  if (saddle.dependent || !(saddle.hess_det > 0.0))
    throw SingularHessianError(
        "log_volume_saddle: active covariance block is singular; remove a "
        "linearly dependent distortion constraint and re-solve");

  double log2_q = 0.0;
  for (std::size_t j = 0; j < saddle.s_star.size(); ++j) {
    if (!saddle.active[j]) continue;
    const double s = saddle.s_star[j];
    const double q = alphabet.is_discrete() ? 1.0 - std::exp(-s) : s;
    log2_q += std::log2(q);
  }
  const double kp = saddle.effective_dim;
  const double prefactor =
      log2_q + 0.5 * (kp * std::log2(2.0 * std::numbers::pi * double(n)) +
                      std::log2(saddle.hess_det));
  const double phi_bits = saddle.f_value_nats / kLn2;
  saddle.prefactor_bits = prefactor;
  saddle.log_volume_bits = double(n) * phi_bits - prefactor;

  VolumeEstimate v;
  v.log_volume_bits = saddle.log_volume_bits;
  v.method = VolumeEstimate::Method::Saddlepoint;
  return v;
}

VolumeEstimate chernoff_log_volume(std::int64_t n, const PhiResult& phi) {
  if (n <= 0) throw DomainError("chernoff_log_volume: n must be positive");
  VolumeEstimate v;
  v.log_volume_bits = double(n) * phi.phi;
  v.method = VolumeEstimate::Method::Chernoff;
  return v;
}

double log2_l1_ball_bits(std::int64_t n, double D) {
  if (n <= 0 || D <= 0) throw DomainError("l1 ball: need n >= 1, D > 0");
  return double(n) * std::log2(2.0 * double(n) * D) -
         std::lgamma(double(n + 1)) / kLn2;
}

double log2_l2_ball_bits(std::int64_t n, double D) {
  if (n <= 0 || D <= 0) throw DomainError("l2 ball: need n >= 1, D > 0");
  return 0.5 * double(n) * std::log2(std::numbers::pi * double(n) * D) -
         std::lgamma(0.5 * double(n) + 1.0) / kLn2;
}

double log2_hamming_ball_bits(std::int64_t n, std::int64_t r, double D) {
  if (n <= 0 || r < 2 || D < 0)
    throw DomainError("hamming ball: need n >= 1, r >= 2, D >= 0");
  const auto radius = static_cast<std::int64_t>(
      std::floor(double(n) * D + 1e-12));
  const std::int64_t top = std::min(radius, n);
  std::vector<double> terms;
  terms.reserve(top + 1);
  for (std::int64_t i = 0; i <= top; ++i)
    terms.push_back(log2_binomial(n, i) +
                    double(i) * std::log2(double(r - 1)));
  return log2_sum_exp2(terms);
}

VolumeEstimate exact_volume(std::int64_t n, const Alphabet& alphabet,
                            const DistortionSpec& spec, double D) {
  if (spec.k() != 1)
    throw DomainError("exact_volume: single-constraint specs only");
  const std::string& label = spec.functions[0].label;
  VolumeEstimate v;
  if (label == "abs") {
    v.log_volume_bits = log2_l1_ball_bits(n, D);
    v.method = VolumeEstimate::Method::ExactL1;
  } else if (label == "square") {
    v.log_volume_bits = log2_l2_ball_bits(n, D);
    v.method = VolumeEstimate::Method::ExactL2;
  } else if (label == "hamming") {
    if (!alphabet.is_discrete())
      throw DomainError("exact_volume: hamming needs a discrete alphabet");
    v.log_volume_bits =
        log2_hamming_ball_bits(n, std::int64_t(alphabet.size()), D);
    v.method = VolumeEstimate::Method::ExactHamming;
  } else {
    throw DomainError("exact_volume: no closed form for '" + label + "'");
  }
  return v;
}

VolumeEstimate monte_carlo_volume(std::int64_t n, const Alphabet& alphabet,
                                  const DistortionSpec& spec,
                                  std::span<const double> D,
                                  std::int64_t samples, std::uint64_t seed,
                                  int jobs) {
  if (n <= 0 || samples <= 0)
    throw DomainError("monte_carlo_volume: n and samples must be positive");
  if (D.size() != spec.k())
    throw DomainError("monte_carlo_volume: level dimension");
  if (static_cast<std::size_t>(n) < static_cast<std::size_t>(spec.common_window()))
    throw LengthError("monte_carlo_volume: n shorter than the window");

  std::vector<double> limits(spec.k());
  for (std::size_t j = 0; j < spec.k(); ++j) {
    const double nd = double(n) * D[j];
    limits[j] = nd + 1e-12 * std::max(1.0, std::abs(nd));
  }

  const bool discrete = alphabet.is_discrete();
  const double lo = discrete ? 0.0 : alphabet.lower();
  const double range = discrete ? 0.0 : alphabet.upper() - alphabet.lower();
  const std::size_t r = alphabet.size();
  const std::int64_t chunks = (samples + kMcChunk - 1) / kMcChunk;
  std::vector<std::int64_t> hits_per_chunk(chunks, 0);

  parallel_for(static_cast<std::size_t>(chunks), jobs, [&](std::size_t c) {
    std::seed_seq sseq{static_cast<std::uint32_t>(seed),
                       static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(sseq);
    const std::int64_t begin = static_cast<std::int64_t>(c) * kMcChunk;
    const std::int64_t count = std::min(kMcChunk, samples - begin);
    std::vector<double> z(static_cast<std::size_t>(n));
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < count; ++i) {
      for (auto& zi : z) {
        if (discrete) {
          zi = alphabet.nodes()[static_cast<std::size_t>(rng() % r)];
        } else {
          zi = lo + range * unit_double(rng);
        }
      }
      const std::vector<double> rho = eval_distortion(z, spec);
      bool inside = true;
      for (std::size_t j = 0; j < rho.size(); ++j)
        inside = inside && rho[j] <= limits[j];
      hits += inside ? 1 : 0;
    }
    hits_per_chunk[c] = hits;
  });

  std::int64_t hits = 0;
  for (std::int64_t h : hits_per_chunk) hits += h;

  const double log2_box = discrete
                              ? double(n) * std::log2(double(r))
                              : double(n) * std::log2(range);
  VolumeEstimate v;
  v.method = VolumeEstimate::Method::MonteCarlo;
  if (hits == 0) {
    // Rule-of-three 95% upper bound; flagged, not a point estimate.
    v.zero_hits = true;
    v.log_volume_bits = std::log2(3.0 / double(samples)) + log2_box;
    v.ci95_bits = std::numeric_limits<double>::infinity();
    return v;
  }
  const double p = double(hits) / double(samples);
  const double sigma = std::sqrt(p * (1.0 - p) / double(samples));
  const double p_lo = std::max(p - 1.96 * sigma, 0.25 / double(samples));
  const double p_hi = std::min(p + 1.96 * sigma, 1.0);
  v.log_volume_bits = std::log2(p) + log2_box;
  v.ci95_bits = 0.5 * (std::log2(p_hi) - std::log2(p_lo));
  return v;
}

}  // namespace slb
