#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slb/alphabet.hpp"
#include "slb/distortion.hpp"
#include "slb/kraft.hpp"

namespace slb {

// Incremental parse: each phrase is the shortest prefix of the remainder not
// yet in the dictionary.  The final phrase may duplicate an earlier one and
// is counted in c all the same.
struct LZParse {
  std::vector<std::vector<int>> phrases;  // symbol indices
  std::size_t c = 0;
  std::size_t n = 0;
};

LZParse lz78_parse(std::span<const int> u, std::size_t r);

struct LZLength {
  double bound_bits = 0.0;       // (c+1) log2(2 r (c+1)) total
  double normalized_bits = 0.0;  // c log2(c) / n, per symbol
  bool degenerate = false;       // empty input
};
LZLength lz78_length_bound(const LZParse& parse, std::size_t r);

// Runs the encoder over the reproduction sequence: per step the output word
// for (state, symbol) is emitted and the state advances.  The trajectory
// holds n + 1 states starting with the initial one.
struct FSRun {
  std::uint64_t total_bits = 0;
  std::vector<int> trajectory;
};
FSRun fs_simulate(const FSEncoder& enc, std::span<const int> v,
                  const Alphabet& alphabet);

// Joint block-frequency table over (state at block start, source block):
// each of the n/ell blocks carries mass ell/n.  Keys read "state:w1,...,wl".
struct EmpiricalJoint {
  std::map<std::string, double> table;
  double joint_entropy_bits = 0.0;     // H(S, U^ell)
  double marginal_entropy_bits = 0.0;  // H(U^ell)
};
EmpiricalJoint empirical_joint(std::span<const int> trajectory,
                               std::span<const int> u, int ell);

// Per-sequence lower bound on the per-symbol description length of any
// s-state information-lossless encoder reproducing u within the distortion
// actually attained by v:
//   c log2(c)/n - Phi(dbar) - Delta - 2 log2(s)/ell
//     + log2(2^zeta - 1)/ell - zeta L_max.
// Delta defaults to 1/ell + ell log2(4 ell r)/(n log2 e), a heuristic slack;
// pass delta_override to substitute a certified value.
struct IndivInputs {
  std::vector<int> u, v;  // same length, symbol indices
  int ell = 1;
  std::size_t states = 1;
  double zeta = 0.0;  // <= 0 selects the default 1/ell
  double l_max_bits = 0.0;
  std::optional<double> delta_override;
};
struct IndivBound {
  double value_bits = 0.0;
  double complexity_bits = 0.0;  // c log2(c)/n of u
  double phi_bits = 0.0;         // Phi at the attained distortion
  double dbar = 0.0;
  double delta_bits = 0.0;
  double state_bits = 0.0;  // 2 log2(s)/ell
  double alpha_bits = 0.0;  // log2(2^zeta - 1)/ell, negative
  double lmax_bits = 0.0;   // zeta L_max
  std::size_t c = 0;
  bool delta_certified = false;
};
IndivBound indiv_slb(const IndivInputs& in, const Alphabet& alphabet,
                     const DistortionSpec& spec);

// Seeded end-to-end soundness harness: Markov binary sources quantized one
// bit per two symbols, bound vs. the LZ78 length guarantee on the
// reproduction and vs. a half-rate finite-state encoder.
struct IndivTrial {
  std::uint64_t trial = 0;
  std::size_t n = 0;
  std::size_t c = 0;             // c(u)
  double normalized_bits = 0.0;  // c log2(c)/n of u
  double dbar = 0.0;
  double bound_bits = 0.0;
  double measured_bits = 0.0;  // per-symbol LZ78 guarantee on v
  double margin_bits = 0.0;    // measured - bound
  double fs_rate_bits = 0.0;   // per-symbol output of the block encoder
};
struct IndivHarnessConfig {
  int trials = 100;
  std::uint64_t seed = 1;
  std::size_t n = 1024;
  int ell = 32;
  int jobs = 1;
};
std::vector<IndivTrial> run_indiv_harness(const IndivHarnessConfig& config);

}  // namespace slb
