#include "slb/bounds.hpp"

#include <cmath>
#include <numbers>

#include "slb/errors.hpp"
#include "slb/optim.hpp"

namespace slb {

double gaussian_entropy_rate(double sigma2) {
  if (!(sigma2 > 0.0))
    throw DomainError("gaussian_entropy_rate: variance must be positive");
  return 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * sigma2);
}

double uniform_entropy_rate(double width) {
  if (!(width > 0.0))
    throw DomainError("uniform_entropy_rate: width must be positive");
  return std::log2(width);
}

double bernoulli_entropy_rate(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError("bernoulli_entropy_rate: p must lie in [0, 1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double slb_classical(const BoundInputs& inputs) {
  if (!std::isfinite(inputs.h_rate_bits))
    throw DomainError("slb_classical: entropy rate must be finite");
  const PhiResult pr = phi(inputs.alphabet, inputs.spec, inputs.spec.levels);
  return inputs.h_rate_bits - pr.phi;
}

double lagrangian_bound(const BoundInputs& inputs,
                        std::span<const double> beta_bits) {
  for (double b : beta_bits)
    if (!(b >= 0.0))
      throw DomainError("lagrangian_bound: tilts must be nonnegative");
  const LogPartition lp =
      log_partition(inputs.alphabet, inputs.spec, beta_bits);
  return inputs.h_rate_bits - lp.value;
}

OneToOneBound slb_one_to_one(double base_bits, int n) {
  if (n < 2) throw DomainError("slb_one_to_one: n must be at least 2");
  if (!std::isfinite(base_bits))
    throw DomainError("slb_one_to_one: base must be finite");
  // t = alpha - 1 on (0, 1], scanned on a log10 grid and polished by golden
  // section in the exponent.
  const auto value_at_exp = [&](double e) {
    const double t = std::pow(10.0, e);
    return (base_bits + std::log2(std::exp2(t) - 1.0) / double(n)) /
           (1.0 + t);
  };
  constexpr int kGrid = 201;
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double e = -10.0 + 10.0 * double(i) / double(kGrid - 1);
    const double v = value_at_exp(e);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  const double e_lo = -10.0 + 10.0 * double(std::max(0, best - 1)) / 200.0;
  const double e_hi =
      -10.0 + 10.0 * double(std::min(kGrid - 1, best + 1)) / 200.0;
  const GoldenResult g = golden_minimize(
      [&](double e) { return -value_at_exp(e); }, e_lo, e_hi, 1e-12);
  OneToOneBound out;
  out.value_bits = std::max(best_v, -g.fx);
  out.alpha_star = 1.0 + std::pow(10.0, g.x);
  out.gap_bits = base_bits - out.value_bits;
  return out;
}

OneToOneBound slb_one_to_one(const BoundInputs& inputs) {
  return slb_one_to_one(slb_classical(inputs), inputs.n);
}

GapFit fit_one_to_one_gap(double base_bits, std::span<const int> ns) {
  if (ns.size() < 2)
    throw DomainError("fit_one_to_one_gap: need at least two block lengths");
  double c_min = std::numeric_limits<double>::infinity();
  double c_max = 0.0;
  for (int n : ns) {
    const OneToOneBound b = slb_one_to_one(base_bits, n);
    const double c = b.gap_bits * double(n) / std::log2(double(n));
    if (!(c > 0.0))
      throw DomainError("fit_one_to_one_gap: gap must be positive");
    c_min = std::min(c_min, c);
    c_max = std::max(c_max, c);
  }
  GapFit fit;
  // Minimax over scalar c: the optimum equalizes the two extreme relative
  // residuals, the harmonic mean of the extremes.
  fit.c = 2.0 / (1.0 / c_min + 1.0 / c_max);
  fit.max_rel_residual = fit.c / c_min - 1.0;
  return fit;
}

double slb_dsf(const BoundInputs& inputs, const VolumeEstimate& volume) {
  if (inputs.n < 1) throw DomainError("slb_dsf: n must be positive");
  return inputs.h_rate_bits - volume.log_volume_bits / double(inputs.n);
}

double dsf_refinement_term(int effective_dim, int n) {
  if (effective_dim < 0 || n < 1)
    throw DomainError("dsf_refinement_term: bad dimension or block length");
  return double(effective_dim) * std::log2(double(n)) / (2.0 * double(n));
}

BoundReport ordering_check(const BoundInputs& inputs) {
  if (inputs.n < 2) throw DomainError("ordering_check: n must be at least 2");
  const PhiResult pr = phi(inputs.alphabet, inputs.spec, inputs.spec.levels);
  const double classical_raw = inputs.h_rate_bits - pr.phi;
  const OneToOneBound one = slb_one_to_one(classical_raw, inputs.n);

  double dsf_raw;
  double refinement;
  try {
    SaddleResult sad =
        find_saddle(inputs.alphabet, inputs.spec, inputs.spec.levels);
    const VolumeEstimate vol =
        log_volume_saddle(inputs.n, sad, inputs.alphabet);
    dsf_raw = slb_dsf(inputs, vol);
    refinement = dsf_refinement_term(sad.effective_dim, inputs.n);
  } catch (const DegenerateError&) {
    dsf_raw = slb_dsf(inputs, chernoff_log_volume(inputs.n, pr));
    refinement = 0.0;
  } catch (const SingularHessianError&) {
    dsf_raw = slb_dsf(inputs, chernoff_log_volume(inputs.n, pr));
    refinement = 0.0;
  }

  const auto entry = [](std::string variant, double raw, double redundancy,
                        std::string ref) {
    BoundEntry e;
    e.variant = std::move(variant);
    e.raw_bits = raw;
    e.value_bits = std::max(0.0, raw);
    e.clamped = raw < 0.0;
    e.redundancy_bits = redundancy;
    e.ref = std::move(ref);
    return e;
  };

  BoundReport report;
  report.entries.push_back(
      entry("one-to-one", one.value_bits, one.gap_bits, "slb-one-to-one"));
  report.entries.push_back(
      entry("classical", classical_raw, 0.0, "slb-classical"));
  report.entries.push_back(
      entry("d-semifaithful", dsf_raw, refinement, "slb-d-semifaithful"));

  const double a = report.entries[0].value_bits;
  const double b = report.entries[1].value_bits;
  const double c = report.entries[2].value_bits;
  constexpr double kTol = 1e-9;
  report.ordering_certificate = a <= b + kTol && b <= c + kTol;
  if (a > b + kTol)
    report.violation = "one-to-one exceeds classical";
  else if (b > c + kTol)
    report.violation = "classical exceeds d-semifaithful";
  return report;
}

}  // namespace slb
