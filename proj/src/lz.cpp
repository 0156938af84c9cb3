#include "slb/lz.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "slb/errors.hpp"
#include "slb/parallel.hpp"
#include "slb/phi.hpp"

namespace slb {

LZParse lz78_parse(std::span<const int> u, std::size_t r) {
  if (r < 1) throw DomainError("lz78_parse: alphabet size must be positive");
  for (int a : u)
    if (a < 0 || static_cast<std::size_t>(a) >= r)
      throw DomainError("lz78_parse: symbol outside the alphabet");

  LZParse parse;
  parse.n = u.size();
  // Flat trie: node i owns children child[i*r .. i*r+r-1], node 0 is the
  // root (the empty phrase, which is always "in the dictionary").
  std::vector<std::int32_t> child(r, -1);
  std::size_t node = 0;
  std::vector<int> phrase;
  for (const int a : u) {
    phrase.push_back(a);
    const std::size_t slot = node * r + static_cast<std::size_t>(a);
    if (child[slot] >= 0) {
      node = static_cast<std::size_t>(child[slot]);
      continue;
    }
    child[slot] = static_cast<std::int32_t>(child.size() / r);
    child.resize(child.size() + r, -1);
    parse.phrases.push_back(phrase);
    phrase.clear();
    node = 0;
  }
  // Leftover symbols repeat an existing phrase; it still counts.
  if (!phrase.empty()) parse.phrases.push_back(std::move(phrase));
  parse.c = parse.phrases.size();
  return parse;
}

LZLength lz78_length_bound(const LZParse& parse, std::size_t r) {
  if (r < 1)
    throw DomainError("lz78_length_bound: alphabet size must be positive");
  LZLength out;
  out.degenerate = parse.c == 0;
  const double cd = static_cast<double>(parse.c);
  out.bound_bits = (cd + 1.0) * std::log2(2.0 * static_cast<double>(r) * (cd + 1.0));
  out.normalized_bits =
      parse.c == 0 ? 0.0 : cd * std::log2(cd) / static_cast<double>(parse.n);
  return out;
}

FSRun fs_simulate(const FSEncoder& enc, std::span<const int> v,
                  const Alphabet& alphabet) {
  check_fs_encoder(enc, alphabet);
  const std::size_t r = alphabet.size();
  FSRun run;
  run.trajectory.reserve(v.size() + 1);
  std::size_t st = static_cast<std::size_t>(enc.initial_state);
  run.trajectory.push_back(static_cast<int>(st));
  for (const int a : v) {
    if (a < 0 || static_cast<std::size_t>(a) >= r)
      throw DomainError("fs_simulate: symbol outside the alphabet");
    run.total_bits += enc.output[st][static_cast<std::size_t>(a)].size();
    st = static_cast<std::size_t>(enc.next[st][static_cast<std::size_t>(a)]);
    run.trajectory.push_back(static_cast<int>(st));
  }
  return run;
}

EmpiricalJoint empirical_joint(std::span<const int> trajectory,
                               std::span<const int> u, int ell) {
  if (ell < 1) throw DomainError("empirical_joint: ell must be positive");
  if (u.empty() || u.size() % static_cast<std::size_t>(ell) != 0)
    throw DomainError("empirical_joint: ell must divide the sequence length");
  if (trajectory.size() != u.size() + 1)
    throw DomainError("empirical_joint: trajectory must hold n + 1 states");

  const std::size_t blocks = u.size() / static_cast<std::size_t>(ell);
  const double mass = 1.0 / static_cast<double>(blocks);
  EmpiricalJoint out;
  std::map<std::string, double> marginal;
  std::string w;
  for (std::size_t b = 0; b < blocks; ++b) {
    w.clear();
    for (int t = 0; t < ell; ++t) {
      if (t) w += ',';
      w += std::to_string(u[b * static_cast<std::size_t>(ell) +
                            static_cast<std::size_t>(t)]);
    }
    out.table[std::to_string(trajectory[b * static_cast<std::size_t>(ell)]) +
              ":" + w] += mass;
    marginal[w] += mass;
  }
  const auto entropy = [](const std::map<std::string, double>& table) {
    double h = 0.0;
    for (const auto& kv : table)
      if (kv.second > 0.0) h -= kv.second * std::log2(kv.second);
    return h;
  };
  out.joint_entropy_bits = entropy(out.table);
  out.marginal_entropy_bits = entropy(marginal);
  return out;
}

IndivBound indiv_slb(const IndivInputs& in, const Alphabet& alphabet,
                     const DistortionSpec& spec) {
  const std::size_t n = in.u.size();
  if (n == 0 || in.v.size() != n)
    throw DomainError("indiv_slb: need equal-length nonempty sequences");
  if (spec.k() != 1 || !spec.single_letter())
    throw DomainError("indiv_slb: needs one per-letter distortion component");
  if (in.ell < 1 || n % static_cast<std::size_t>(in.ell) != 0)
    throw DomainError("indiv_slb: ell must divide the sequence length");
  if (in.states < 1) throw DomainError("indiv_slb: need at least one state");
  if (!(in.l_max_bits >= 0.0))
    throw DomainError("indiv_slb: the length cap must be nonnegative");
  const std::size_t r = alphabet.size();
  const auto& nodes = alphabet.nodes();
  for (std::size_t i = 0; i < n; ++i)
    if (in.u[i] < 0 || static_cast<std::size_t>(in.u[i]) >= r || in.v[i] < 0 ||
        static_cast<std::size_t>(in.v[i]) >= r)
      throw DomainError("indiv_slb: symbol outside the alphabet");
  const double zeta = in.zeta > 0.0 ? in.zeta : 1.0 / static_cast<double>(in.ell);

  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i)
    diff[i] = alphabet.difference(nodes[static_cast<std::size_t>(in.u[i])],
                                  nodes[static_cast<std::size_t>(in.v[i])]);
  const std::vector<double> rho = eval_distortion(diff, spec);

  IndivBound out;
  const LZParse parse = lz78_parse(in.u, r);
  out.c = parse.c;
  out.complexity_bits = lz78_length_bound(parse, r).normalized_bits;
  out.dbar = rho[0] / static_cast<double>(n);
  const std::vector<double> level = {out.dbar};
  out.phi_bits = phi(alphabet, spec, level).phi;
  out.delta_bits =
      in.delta_override
          ? *in.delta_override
          : 1.0 / static_cast<double>(in.ell) +
                static_cast<double>(in.ell) *
                    std::log2(4.0 * static_cast<double>(in.ell) *
                              static_cast<double>(r)) /
                    (static_cast<double>(n) * std::numbers::log2e);
  out.delta_certified = in.delta_override.has_value();
  out.state_bits =
      2.0 * std::log2(static_cast<double>(in.states)) / static_cast<double>(in.ell);
  out.alpha_bits = std::log2(std::expm1(zeta * std::numbers::ln2)) /
                   static_cast<double>(in.ell);
  out.lmax_bits = zeta * in.l_max_bits;
  out.value_bits = out.complexity_bits - out.phi_bits - out.delta_bits -
                   out.state_bits + out.alpha_bits - out.lmax_bits;
  return out;
}

std::vector<IndivTrial> run_indiv_harness(const IndivHarnessConfig& config) {
  if (config.trials < 1)
    throw DomainError("run_indiv_harness: need at least one trial");
  if (config.ell < 2 || config.ell % 2 != 0)
    throw DomainError("run_indiv_harness: ell must be even and positive");
  if (config.n < static_cast<std::size_t>(config.ell) ||
      config.n % static_cast<std::size_t>(config.ell) != 0)
    throw DomainError("run_indiv_harness: ell must divide n");

  const Alphabet alphabet = Alphabet::binary();
  const DistortionSpec spec = make_spec({hamming_distortion()}, {0.25});
  const std::vector<std::vector<double>> codebook = {{0.0, 0.0}, {1.0, 1.0}};
  const std::vector<std::int32_t> table =
      nearest_encode_table(2, alphabet, codebook, spec);

  // One output bit per two reproduction symbols; the split states keep the
  // single-step certificate satisfied while the first symbol idles.
  FSEncoder half;
  half.state_count = 3;
  half.output = {{"", ""}, {"0", "1"}, {"0", "1"}};
  half.next = {{1, 2}, {0, 0}, {0, 0}};
  half.initial_state = 0;

  std::vector<IndivTrial> rows(static_cast<std::size_t>(config.trials));
  parallel_for(static_cast<std::size_t>(config.trials), config.jobs,
               [&](std::size_t t) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      std::uint32_t{0x6C7A}, static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    static constexpr double kStay[] = {0.55, 0.65, 0.75, 0.85, 0.95};
    const double stay = kStay[rng() % 5];
    const std::size_t n = config.n;

    IndivInputs in;
    in.u.resize(n);
    in.v.resize(n);
    in.u[0] = static_cast<int>(rng() % 2);
    for (std::size_t i = 1; i < n; ++i) {
      const double coin = static_cast<double>(rng() >> 11) * 0x1p-53;
      in.u[i] = coin < stay ? in.u[i - 1] : 1 - in.u[i - 1];
    }
    for (std::size_t b = 0; b < n / 2; ++b) {
      const std::size_t rank =
          static_cast<std::size_t>(in.u[2 * b]) * 2 +
          static_cast<std::size_t>(in.u[2 * b + 1]);
      const auto& cv = codebook[static_cast<std::size_t>(table[rank])];
      in.v[2 * b] = static_cast<int>(cv[0]);
      in.v[2 * b + 1] = static_cast<int>(cv[1]);
    }
    in.ell = config.ell;
    in.states = 1;
    in.zeta = 0.0;  // default 1/ell
    in.l_max_bits = 10.0;

    const IndivBound bound = indiv_slb(in, alphabet, spec);
    const double measured =
        lz78_length_bound(lz78_parse(in.v, 2), 2).bound_bits /
        static_cast<double>(n);
    const FSRun fs = fs_simulate(half, in.v, alphabet);

    IndivTrial& row = rows[t];
    row.trial = t;
    row.n = n;
    row.c = bound.c;
    row.normalized_bits = bound.complexity_bits;
    row.dbar = bound.dbar;
    row.bound_bits = bound.value_bits;
    row.measured_bits = measured;
    row.margin_bits = measured - bound.value_bits;
    row.fs_rate_bits =
        static_cast<double>(fs.total_bits) / static_cast<double>(n);
  });
  return rows;
}

}  // namespace slb
