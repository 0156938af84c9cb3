#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slb/alphabet.hpp"
#include "slb/distortion.hpp"

// Sliding-window transfer operator: states are (m-1)-letter prefixes, a
// transition appends one letter and pays 2^{-beta.rho(window)}.  Continuous
// alphabets are discretized on their quadrature grid (Nystrom) and stored in
// the weight-balanced form sqrt(w_first) K sqrt(w_last), which preserves the
// spectrum and turns symmetric kernels into symmetric matrices.

namespace slb {

inline constexpr std::size_t kStateBudget = 4096;

struct TransferOperator {
  std::size_t state_dim = 1;
  int m = 1;
  bool continuous = false;
  std::vector<double> beta;     // current tilts, bits domain
  std::vector<double> entries;  // row-major state_dim x state_dim

  // Re-tilt cache.  For m >= 2: per-entry window distortions and the
  // untilted balanced weight (zero on forbidden transitions).  For m == 1:
  // per-letter values feeding the single partition-sum entry.
  std::vector<std::vector<double>> rho;
  std::vector<double> base_weight;
};

TransferOperator build_operator(const Alphabet& alphabet,
                                const DistortionSpec& spec,
                                std::span<const double> beta_bits,
                                std::size_t budget = kStateBudget);

// Recomputes entries for new tilts on the cached window distortions.
void retilt_operator(TransferOperator& op, std::span<const double> beta_bits);

struct SpectralResult {
  double lambda = 0.0;
  double log_lambda_bits = 0.0;
  std::vector<double> right_vector;  // sup-normalized
  int iterations = 0;
  double residual = 0.0;  // ||M v - lambda v||_inf / lambda
};

// Power iteration (with a diagonal shift, so periodic support cannot stall
// it) to residual <= 1e-10.  The support pattern must be strongly connected.
SpectralResult spectral_radius(const TransferOperator& op, int jobs = 1);

struct SlidingBound {
  double value_bits = 0.0;      // h - objective
  double objective_bits = 0.0;  // inf over tilts of log2 lambda + beta.D
  double log_lambda_bits = 0.0;
  std::vector<double> beta_star;
  bool grid_fallback = false;   // descent missed the grid optimum
  bool under_resolved = false;  // doubling the grid moved log2 lambda > 1e-4
  int iterations = 0;
};

// h - inf_{beta >= 0} (log2 lambda(beta) + beta.D), with D from spec.levels.
// Single-letter specs reduce exactly to the entropy-maximization value.  The
// descent uses the eigenvector form of the gradient; a coarse grid scan
// guards the result and takes over if it wins.
SlidingBound sliding_slb(const Alphabet& alphabet, const DistortionSpec& spec,
                         double h_rate_bits, int jobs = 1);

// |numeric objective - 1/2 log2(2 pi e D (1 - theta^2))| for the
// variance-plus-adjacent-correlation pair on the default grids.
double gaussian_example_check(double D, double theta);

}  // namespace slb
