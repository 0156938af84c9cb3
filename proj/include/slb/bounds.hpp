#pragma once

#include <span>
#include <string>
#include <vector>

#include "slb/alphabet.hpp"
#include "slb/distortion.hpp"
#include "slb/phi.hpp"
#include "slb/saddle.hpp"

// Assembles the rate lower bounds into named, comparable per-symbol values.
// Every raw value keeps its sign; clamping at zero happens only in display
// fields so regressions can track the underlying inequality.

namespace slb {

// Entropy rates in bits/symbol for the built-in memoryless source models.
double gaussian_entropy_rate(double sigma2);
double uniform_entropy_rate(double width);
double bernoulli_entropy_rate(double p);

struct BoundInputs {
  double h_rate_bits = 0.0;
  int n = 1;
  Alphabet alphabet = Alphabet::binary();
  DistortionSpec spec;  // levels carry the distortion budget D
};

struct BoundEntry {
  std::string variant;
  double raw_bits = 0.0;
  double value_bits = 0.0;  // max(raw, 0)
  bool clamped = false;
  double redundancy_bits = 0.0;  // distance below the classical value, or the
                                 // block-length refinement for the cover bound
  std::string ref;
};

struct BoundReport {
  std::vector<BoundEntry> entries;
  bool ordering_certificate = false;
  std::string violation;  // names the offending pair when the check fails
};

// h - phi(D).
double slb_classical(const BoundInputs& inputs);

// h - log2 sum 2^{-beta.rho}: a bound on rate + beta.distortion per symbol,
// valid at every nonnegative tilt and touching the classical value at the
// optimal one.
double lagrangian_bound(const BoundInputs& inputs,
                        std::span<const double> beta_bits);

struct OneToOneBound {
  double value_bits = 0.0;
  double alpha_star = 1.0;
  double gap_bits = 0.0;  // base - value; positive for finite n
};

// sup over alpha of base/alpha + log2(2^{alpha-1}-1)/(alpha n).  The search
// window is (1, 2]: past 2 the length-spectrum term changes sign and the
// expression stops being a refinement of the base value (codebooks that use
// the empty description break the unrestricted sup), while the maximizer for
// any nonvacuous base sits at 1 + O(log(n)/n) anyway.
OneToOneBound slb_one_to_one(double base_bits, int n);
OneToOneBound slb_one_to_one(const BoundInputs& inputs);

// Minimax fit of gap(n) ~ c log2(n)/n over sample block lengths: returns the
// constant and the worst relative residual.
struct GapFit {
  double c = 0.0;
  double max_rel_residual = 0.0;
};
GapFit fit_one_to_one_gap(double base_bits, std::span<const int> ns);

// h - log_volume/n for a volume estimate computed at the same n, spec and D.
double slb_dsf(const BoundInputs& inputs, const VolumeEstimate& volume);

// Leading refinement above the classical value when the volume comes from
// the second-order estimate: k' log2(n) / (2n).
double dsf_refinement_term(int effective_dim, int n);

// Evaluates the one-to-one, classical and cover bounds on one input set and
// certifies their ordering on the clamped values.  The cover bound uses the
// second-order volume and falls back to the first-order (Chernoff) volume
// when the saddle problem degenerates, in which case it collapses onto the
// classical value.
BoundReport ordering_check(const BoundInputs& inputs);

}  // namespace slb
