#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slb/alphabet.hpp"
#include "slb/distortion.hpp"

namespace slb {

inline constexpr std::uint64_t kEnumerationBudget = std::uint64_t(1) << 20;

enum class CodeClass { UD, OneToOne, FixedRate };

// A block code: quantizer table over U^n plus a binary description length
// per codeword.  Source vectors are addressed by lexicographic rank
// (first letter = most significant digit, base |U|).
struct BlockCode {
  int n = 0;
  Alphabet alphabet = Alphabet::binary();
  std::vector<std::vector<double>> codebook;  // reproduction vectors
  std::vector<int> lengths;                   // description bits per codeword
  std::vector<std::int32_t> encode;           // source rank -> codebook index
  CodeClass class_flag = CodeClass::UD;
  double rate = 0.0;  // FixedRate only
};

// A block quantizer: maps every U^m block (by rank) to a codebook vector.
struct BlockQuantizer {
  int m = 1;
  Alphabet alphabet = Alphabet::binary();
  std::vector<std::vector<double>> codebook;
  std::vector<std::int32_t> table;  // block rank -> codebook index
};

// A finite-state encoder over binary output strings.  The machine consumes
// one reproduction symbol per step: output(state, symbol) is appended and
// next(state, symbol) becomes the state.
struct FSEncoder {
  int state_count = 1;
  std::vector<std::vector<std::string>> output;  // [state][symbol index]
  std::vector<std::vector<int>> next;            // [state][symbol index]
  int initial_state = 0;
};

// Validates an encoder's tables against the alphabet and certifies the
// single-step information-lossless property: within every state, distinct
// symbols must map to distinct (output, next state) pairs.
void check_fs_encoder(const FSEncoder& enc, const Alphabet& alphabet);

struct KraftReport {
  int lemma = 0;
  std::string variant;  // ud | one-to-one | d-semifaithful | fixed-rate | finite-state
  double z_value = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  double alpha = 0.0;
  std::vector<double> beta;
  int n = 0;       // block length, or ell for the finite-state case
  int states = 0;  // finite-state case only
  std::optional<double> level;  // D for the d-semifaithful case
  std::uint64_t seed = 0;       // campaign bookkeeping
  std::uint64_t trial = 0;
};

// Lexicographic rank <-> symbol string helpers.
std::vector<double> rank_to_string(std::uint64_t rank, int n,
                                   const Alphabet& alphabet);
std::uint64_t string_to_rank(std::span<const double> u,
                             const Alphabet& alphabet);

// Per-letter partition sum S = sum_z 2^{-beta.rho(z)} over the alphabet.
double per_letter_sum(const Alphabet& alphabet, const DistortionSpec& spec,
                      std::span<const double> beta);

// Exact Z = sum_{u^n} 2^{-alpha L[phi(u)] - beta.rho(u - psi(phi(u)))} by full
// enumeration.  Requires a modular discrete alphabet and |U|^n within budget.
double kraft_z(const BlockCode& code, double alpha,
               std::span<const double> beta, const DistortionSpec& spec,
               int jobs = 1);

// Seeded uniform-sampling estimate of the same sum, for blocks beyond the
// enumeration budget.  Never certifies anything.
struct KraftZEstimate {
  double z = 0.0;
  double ci95 = 0.0;
  std::int64_t samples = 0;
  bool certifying = false;
};
KraftZEstimate kraft_z_mc(const BlockCode& code, double alpha,
                          std::span<const double> beta,
                          const DistortionSpec& spec, std::int64_t samples,
                          std::uint64_t seed, int jobs = 1);

// Exhaustive count of difference strings z^n with rho(z^n) <= nD (the
// discrete ball volume for arbitrary specs).
double ball_count(const Alphabet& alphabet, const DistortionSpec& spec,
                  double D, int n, int jobs = 1);

// Certifies the inequality matching the code's class: uniquely-decodable
// (variant "ud"), one-to-one, or fixed-rate.  A D level switches a UD code to
// the d-semifaithful variant, whose pointwise constraint is checked first and
// whose right-hand side is the exact ball count.
KraftReport verify_lemma(const BlockCode& code, double alpha,
                         std::span<const double> beta,
                         const DistortionSpec& spec,
                         std::optional<double> D = std::nullopt, int jobs = 1);

// Certifies the finite-state inequality: sums over every starting state and
// every source block w^ell; bound = s^2 S^ell / (2^{alpha-1} - 1).  The
// information-lossless gate is the single-step certificate (per-state
// injectivity of symbol -> (output, next state)).
KraftReport verify_lemma5(const FSEncoder& enc, const BlockQuantizer& q,
                          int ell, double alpha, std::span<const double> beta,
                          const DistortionSpec& spec, int jobs = 1);

// Builders. Every encode table entry must point into the codebook; the
// shannon-length builder additionally requires every cell to be nonempty.
BlockCode build_shannon_code(int n, const Alphabet& alphabet,
                             std::vector<std::vector<double>> codebook,
                             std::vector<std::int32_t> encode);
BlockCode build_one_to_one_enumerative(int n, const Alphabet& alphabet,
                                       std::vector<std::vector<double>> codebook,
                                       std::vector<std::int32_t> encode);
BlockCode build_fixed_rate(int n, const Alphabet& alphabet,
                           std::vector<std::vector<double>> codebook,
                           std::vector<std::int32_t> encode, double rate);
// Greedy cover of U^n by radius-nD balls, nearest-center encoding, shannon
// lengths from cell masses, exhaustive pointwise post-check.
BlockCode build_dsf_cover(int n, const Alphabet& alphabet,
                          const DistortionSpec& spec, double D);

// Nearest-codeword encode table under the spec's distortion (ties break to
// the lowest codebook index).
std::vector<std::int32_t> nearest_encode_table(
    int n, const Alphabet& alphabet,
    const std::vector<std::vector<double>>& codebook,
    const DistortionSpec& spec);

// Randomized certification campaigns over the binary alphabet with hamming
// distortion; one report per trial, deterministic per (seed, lemma, trial)
// and independent of the worker count.
struct CampaignConfig {
  int lemma = 1;
  int trials = 200;
  std::uint64_t seed = 1;
  int max_n = 10;    // block length cap, lemmas 1-4
  int max_ell = 8;   // lemma 5 block cap
  int jobs = 1;
};
std::vector<KraftReport> run_campaign(const CampaignConfig& config);

// One trial of the campaign, for callers that want to keep going after a
// failed certification.  Trial i here is exactly trial i of run_campaign.
KraftReport run_campaign_trial(const CampaignConfig& config,
                               std::uint64_t trial);

}  // namespace slb
