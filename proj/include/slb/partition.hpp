#pragma once

#include <span>
#include <vector>

#include "slb/alphabet.hpp"
#include "slb/distortion.hpp"
#include "slb/linalg.hpp"

// Single-letter tilted partition sums and their moments, the shared core of
// the rate-distortion machinery.  Everything here works in the natural-log
// domain (weights e^{-s.rho}); callers wanting the bits convention pass
// s = beta * ln 2 and divide values by ln 2.

namespace slb {

// Integration grid after infinite-well restriction.  Components whose tilt is
// positive and whose shape is a well shrink the continuous domain to the well
// intersection (re-gridded with the alphabet's rule, so no jump is integrated
// across); on discrete alphabets they filter symbols instead.
struct Grid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Grid effective_grid(const Alphabet& alphabet, const DistortionSpec& spec,
                    std::span<const double> s_nat);

struct TiltedMoments {
  double log_z_nat = 0.0;            // ln sum w e^{-s.rho}
  std::vector<double> mean;          // E[rho_j] under the tilted density
  linalg::Matrix cov;                // Cov[rho_i, rho_j], natural domain
};

// Requires a single-letter spec.  Throws DivergenceError when the partition
// sum vanishes or a zero-tilt component has infinite distortion mass.
TiltedMoments tilted_moments(const Alphabet& alphabet,
                             const DistortionSpec& spec,
                             std::span<const double> s_nat, bool want_cov);

// Value-only fast path.
double log_partition_nat(const Alphabet& alphabet, const DistortionSpec& spec,
                         std::span<const double> s_nat);

// The maximum-entropy density 2^{-beta.rho(z)} / Z over its effective grid.
struct TiltedDensity {
  Grid grid;
  std::vector<double> density;   // integrates to 1 against grid weights
  double log_z_bits = 0.0;
  std::vector<double> beta;

  double entropy_bits() const;
  std::vector<double> expected_distortion(const DistortionSpec& spec) const;
};

TiltedDensity make_tilted(const Alphabet& alphabet, const DistortionSpec& spec,
                          std::span<const double> beta_bits);

// Smallest achievable single-letter distortion on the grid, with the total
// grid weight sitting at that minimum.  Used for essential-infimum handling.
struct DistortionFloor {
  double min_value = 0.0;
  double weight_at_min = 0.0;
};

DistortionFloor distortion_floor(const Alphabet& alphabet,
                                 const DistortionSpec& spec, std::size_t j);

}  // namespace slb
