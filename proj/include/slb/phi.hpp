#pragma once

#include <span>
#include <vector>

#include "slb/alphabet.hpp"
#include "slb/distortion.hpp"
#include "slb/linalg.hpp"
#include "slb/partition.hpp"

// The single-letter entropy-maximization machinery: the tilted log-partition
// in the bits convention, the distortion-constrained maximum entropy value
// phi(D) = inf_{beta >= 0} (beta.D + log2 sum 2^{-beta.rho}), and the dual
// distortion-rate form.  All public values are bits per symbol.

namespace slb {

struct LogPartition {
  double value = 0.0;                 // log2 sum w 2^{-beta.rho}
  std::vector<double> gradient;       // d/dbeta_j = -E_tilted[rho_j]
  linalg::Matrix covariance;          // Cov[rho_i, rho_j] (natural domain)
};

LogPartition log_partition(const Alphabet& alphabet, const DistortionSpec& spec,
                           std::span<const double> beta_bits);

struct PhiResult {
  double phi = 0.0;                   // bits per symbol
  std::vector<double> beta_star;      // bits-domain tilts
  std::vector<bool> active_mask;      // beta_j > active epsilon
  bool degenerate = false;            // every tilt at 0
  bool at_floor = false;              // D pinned at the distortion floor
  bool dependent_constraints = false; // singular active covariance
  bool converged = false;
  int iterations = 0;
};

inline constexpr double kActiveEps = 1e-8;

PhiResult phi(const Alphabet& alphabet, const DistortionSpec& spec,
              std::span<const double> D);

// Residuals of the maximum-entropy characterization at the optimum: the
// tilted density's entropy must equal phi and its active moments must meet
// their levels.
struct MaxEntCheck {
  bool applicable = false;
  double entropy_gap_bits = 0.0;
  std::vector<double> moment_gaps;
};

MaxEntCheck maxent_check(const PhiResult& result, const Alphabet& alphabet,
                         const DistortionSpec& spec, std::span<const double> D);

// sup_{gamma >= 0} gamma (h - log2 sum 2^{-rho/gamma} - R), clamped at 0.
// Lower-bounds the distortion of any code of rate R against an entropy-rate-h
// source; requires a single-constraint spec.
double distortion_rate_bound(const Alphabet& alphabet,
                             const DistortionSpec& spec, double rate_bits,
                             double h_rate_bits);

// Truncation helper: doubles the half-width until the omitted tail of
// 2^{-beta_min.rho} is below `tail_tol` of the integral, then returns an
// alphabet on the doubled interval.
Alphabet suggest_truncated_interval(
    const DistortionSpec& spec, std::span<const double> beta_min_bits,
    int node_count, QuadratureRule rule = QuadratureRule::CompositeSimpson,
    double tail_tol = 1e-12);

}  // namespace slb
