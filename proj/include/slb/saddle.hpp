#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "slb/alphabet.hpp"
#include "slb/distortion.hpp"
#include "slb/linalg.hpp"
#include "slb/phi.hpp"

namespace slb {

// Upper gaussian tail P(N(0,1) > t).
double q_function(double t);

// f(s) = s.D + ln Z(s) in nats, with D taken from spec.levels.
// gradient = D - E_tilted[rho], hessian = Cov_tilted[rho].
struct FEval {
  double value_nats;
  std::vector<double> gradient;
  linalg::Matrix hessian;
};
FEval f_eval(const Alphabet& alphabet, const DistortionSpec& spec,
             std::span<const double> s_nat);

struct SaddleResult {
  std::vector<double> s_star;  // natural-log tilts; pruned coordinates are 0
  std::vector<bool> active;    // counted in the effective dimension
  std::vector<bool> flat;      // wells: clip the domain but carry no curvature
  double f_value_nats = 0.0;
  double hess_det = 0.0;  // determinant of the active covariance block
  int effective_dim = 0;
  bool dependent = false;  // active block numerically rank-deficient
  int iterations = 0;
  double log_volume_bits = std::numeric_limits<double>::quiet_NaN();
  double prefactor_bits = std::numeric_limits<double>::quiet_NaN();
};

// Minimizes f over s >= 0, prunes boundary coordinates, re-solves on the
// reduced set, and polishes with Newton steps until the active gradient is
// below 1e-10.  Throws DegenerateError when nothing remains active.
SaddleResult find_saddle(const Alphabet& alphabet, const DistortionSpec& spec,
                         std::span<const double> D);

struct VolumeEstimate {
  double log_volume_bits;
  enum class Method {
    ExactL1,
    ExactL2,
    ExactHamming,
    MonteCarlo,
    Chernoff,
    Saddlepoint
  } method;
  std::optional<double> ci95_bits;  // monte-carlo half width
  bool zero_hits = false;  // estimate degraded to a 95% upper sentinel
};

const char* method_name(VolumeEstimate::Method method);

// Second-order estimate of log2 Vol{z^n : rho(z^n) <= nD}.  Also stores the
// volume fields back into `saddle`.  The per-coordinate kernel factor is s
// on continuous alphabets and 1-exp(-s) on discrete ones (integer-valued
// distortion sums see a geometric, not continuous, step kernel).
VolumeEstimate log_volume_saddle(std::int64_t n, SaddleResult& saddle,
                                 const Alphabet& alphabet);

// First-order bound log2 Vol <= n * Phi(D); valid at every n.
VolumeEstimate chernoff_log_volume(std::int64_t n, const PhiResult& phi);

// Closed-form ball volumes for the builtin single-constraint distortions
// ("abs", "square", "hamming").  The alphabet supplies the symbol count for
// the hamming case and is ignored otherwise.
VolumeEstimate exact_volume(std::int64_t n, const Alphabet& alphabet,
                            const DistortionSpec& spec, double D);

// Uniform sampling over the alphabet box; deterministic per seed and
// independent of the worker count (fixed-size seeded substreams).
VolumeEstimate monte_carlo_volume(std::int64_t n, const Alphabet& alphabet,
                                  const DistortionSpec& spec,
                                  std::span<const double> D,
                                  std::int64_t samples, std::uint64_t seed,
                                  int jobs = 1);

double log2_l1_ball_bits(std::int64_t n, double D);
double log2_l2_ball_bits(std::int64_t n, double D);
double log2_hamming_ball_bits(std::int64_t n, std::int64_t r, double D);

}  // namespace slb
