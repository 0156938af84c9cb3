#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "slb/errors.hpp"
#include "slb/lz.hpp"

using namespace slb;

namespace {

std::vector<int> bits_from(const char* s) {
  std::vector<int> out;
  for (const char* p = s; *p; ++p) out.push_back(*p - '0');
  return out;
}

}  // namespace

TEST_CASE("incremental parse of the 15-symbol worked example") {
  const std::vector<int> u = bits_from("011010011000100");
  const LZParse parse = lz78_parse(u, 2);
  CHECK(parse.c == 8);
  CHECK(parse.n == 15);
  const std::vector<std::vector<int>> want = {
      {0}, {1}, {1, 0}, {1, 0, 0}, {1, 1}, {0, 0}, {0, 1}, {0, 0}};
  REQUIRE(parse.phrases.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    CHECK(parse.phrases[i] == want[i]);
  // The trailing phrase repeats an earlier one and still counts.
  CHECK(parse.phrases.back() == parse.phrases[5]);

  const LZLength len = lz78_length_bound(parse, 2);
  CHECK(std::abs(len.bound_bits - 46.5293) <= 0.01);
  CHECK(len.bound_bits == doctest::Approx(9.0 * std::log2(36.0)).epsilon(1e-12));
  CHECK(!len.degenerate);
}

TEST_CASE("degenerate and triangular parses") {
  const LZParse empty = lz78_parse(std::vector<int>{}, 2);
  CHECK(empty.c == 0);
  const LZLength len = lz78_length_bound(empty, 2);
  CHECK(len.degenerate);
  CHECK(len.bound_bits == doctest::Approx(2.0));  // log2(2r) with r = 2
  CHECK(len.normalized_bits == 0.0);

  // 0^45 parses into 0, 00, ..., 0^9 exactly; one more symbol repeats "0".
  const LZParse tri = lz78_parse(std::vector<int>(45, 0), 2);
  CHECK(tri.c == 9);
  const LZParse tri1 = lz78_parse(std::vector<int>(46, 0), 2);
  CHECK(tri1.c == 10);
  CHECK(tri1.phrases.back() == std::vector<int>{0});

  const LZParse flat = lz78_parse(std::vector<int>(1000, 0), 2);
  CHECK(lz78_length_bound(flat, 2).normalized_bits < 0.25);

  CHECK_THROWS_AS(lz78_parse(std::vector<int>{0, 2}, 2), DomainError);
}

TEST_CASE("parse round-trip on 1000 random strings") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = 2 + rng() % 3;
    const std::size_t n = rng() % 200;
    std::vector<int> u(n);
    for (auto& a : u) a = static_cast<int>(rng() % r);
    const LZParse parse = lz78_parse(u, r);
    std::vector<int> back;
    for (const auto& phrase : parse.phrases)
      back.insert(back.end(), phrase.begin(), phrase.end());
    REQUIRE(back == u);
    REQUIRE(parse.c == parse.phrases.size());
    // Sub-linear phrase complexity.
    if (n > 0) {
      const double c = static_cast<double>(parse.c);
      REQUIRE(c * std::log2(std::max(c, 2.0)) <=
              static_cast<double>(n) * std::log2(static_cast<double>(r)) +
                  3.0 * c);
    }
  }
}

TEST_CASE("encoder simulation: totals, trajectory, idling, certificates") {
  const Alphabet binary = Alphabet::binary();
  const std::vector<int> v = bits_from("0110100110");

  FSEncoder one_bit;
  one_bit.output = {{"0", "1"}};
  one_bit.next = {{0, 0}};
  const FSRun run = fs_simulate(one_bit, v, binary);
  CHECK(run.total_bits == v.size());
  CHECK(run.trajectory.size() == v.size() + 1);
  CHECK(run.trajectory.front() == 0);

  FSEncoder idler;
  idler.output = {{"", "1"}};
  idler.next = {{0, 0}};
  CHECK(fs_simulate(idler, v, binary).total_bits < v.size());

  FSEncoder merging;
  merging.output = {{"0", "0"}};
  merging.next = {{0, 0}};
  CHECK_THROWS_AS(fs_simulate(merging, v, binary), CertificateError);

  CHECK_THROWS_AS(fs_simulate(one_bit, std::vector<int>{0, 3}, binary),
                  DomainError);
}

TEST_CASE("empirical joint: normalization, marginals, state chain") {
  const Alphabet binary = Alphabet::binary();
  const std::vector<int> u = bits_from("01101001100101");

  FSEncoder one_bit;
  one_bit.output = {{"0", "1"}};
  one_bit.next = {{0, 0}};
  const FSRun flat = fs_simulate(one_bit, u, binary);
  const EmpiricalJoint single = empirical_joint(flat.trajectory, u, 1);
  double ones = 0.0;
  for (int a : u) ones += a;
  CHECK(single.table.at("0:1") == doctest::Approx(ones / double(u.size())));
  CHECK(single.joint_entropy_bits ==
        doctest::Approx(single.marginal_entropy_bits).epsilon(1e-12));

  // Two-state parity machine: the state at each step carries extra entropy.
  FSEncoder parity;
  parity.state_count = 2;
  parity.output = {{"0", "1"}, {"0", "1"}};
  parity.next = {{0, 1}, {1, 0}};
  const FSRun run = fs_simulate(parity, u, binary);
  for (const int ell : {1, 2, 7}) {
    const EmpiricalJoint j = empirical_joint(run.trajectory, u, ell);
    double total = 0.0;
    for (const auto& kv : j.table) total += kv.second;
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK(j.joint_entropy_bits >= j.marginal_entropy_bits - 1e-9);
    CHECK(j.joint_entropy_bits <= j.marginal_entropy_bits + 1.0 + 1e-9);
  }
  CHECK_THROWS_AS(empirical_joint(run.trajectory, u, 3), DomainError);

  const std::vector<int> zeros(12, 0);
  const FSRun zrun = fs_simulate(one_bit, zeros, binary);
  CHECK(empirical_joint(zrun.trajectory, zeros, 4).marginal_entropy_bits ==
        doctest::Approx(0.0));
}

TEST_CASE("individual-sequence bound: terms, zero distortion, slack sizes") {
  const Alphabet binary = Alphabet::binary();
  const DistortionSpec spec = make_spec({hamming_distortion()}, {0.25});

  std::mt19937_64 rng(99);
  std::vector<int> u(1024);
  for (auto& a : u) a = static_cast<int>(rng() % 2);

  IndivInputs in;
  in.u = u;
  in.v = u;  // zero distortion
  in.ell = 32;
  in.states = 1;
  in.l_max_bits = 10.0;
  const IndivBound zd = indiv_slb(in, binary, spec);
  CHECK(zd.dbar == 0.0);
  CHECK(zd.phi_bits == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zd.state_bits == 0.0);
  CHECK(zd.value_bits ==
        doctest::Approx(zd.complexity_bits - zd.phi_bits - zd.delta_bits -
                        zd.state_bits + zd.alpha_bits - zd.lmax_bits)
            .epsilon(1e-15));
  CHECK(!zd.delta_certified);
  CHECK(zd.alpha_bits < 0.0);

  // Attained distortion is measured, not taken from the spec level.
  IndivInputs quarter = in;
  for (std::size_t i = 0; i < quarter.v.size(); i += 4)
    quarter.v[i] = 1 - quarter.v[i];
  const IndivBound qd = indiv_slb(quarter, binary, spec);
  CHECK(qd.dbar == doctest::Approx(0.25));
  CHECK(qd.phi_bits ==
        doctest::Approx(oracle::binary_entropy_bits(0.25)).epsilon(1e-9));

  // ell = n with a certified 1/ell slack: every slack term is at most
  // 2 log2(n) / n.
  IndivInputs wide = in;
  wide.ell = 1024;
  wide.delta_override = 1.0 / 1024.0;
  const IndivBound wd = indiv_slb(wide, binary, spec);
  const double cap = 2.0 * std::log2(1024.0) / 1024.0;
  CHECK(wd.delta_bits <= cap);
  CHECK(std::abs(wd.alpha_bits) <= cap);
  CHECK(wd.lmax_bits <= cap);
  CHECK(wd.state_bits <= cap);
  CHECK(wd.delta_certified);

  IndivInputs bad = in;
  bad.ell = 48;  // does not divide 1024
  CHECK_THROWS_AS(indiv_slb(bad, binary, spec), DomainError);
  bad = in;
  bad.v.pop_back();
  CHECK_THROWS_AS(indiv_slb(bad, binary, spec), DomainError);
  bad = in;
  bad.states = 0;
  CHECK_THROWS_AS(indiv_slb(bad, binary, spec), DomainError);
  const DistortionSpec pair = make_spec({neg_correlation()}, {0.0});
  CHECK_THROWS_AS(indiv_slb(in, binary, pair), DomainError);
}

TEST_CASE("soundness harness: margins stay nonnegative, runs deterministic") {
  IndivHarnessConfig config;
  config.trials = 100;
  config.seed = 7;
  config.jobs = 2;
  const std::vector<IndivTrial> rows = run_indiv_harness(config);
  REQUIRE(rows.size() == 100);
  for (const IndivTrial& row : rows) {
    CHECK(row.margin_bits >= 0.0);
    CHECK(row.measured_bits >= row.bound_bits);
    CHECK(row.fs_rate_bits == doctest::Approx(0.5));
    CHECK(row.fs_rate_bits >= row.bound_bits);
    CHECK(row.c > 0);
    CHECK(row.dbar >= 0.0);
    CHECK(row.dbar <= 0.5);
    CHECK(row.n == 1024);
  }

  IndivHarnessConfig serial = config;
  serial.jobs = 1;
  const std::vector<IndivTrial> again = run_indiv_harness(serial);
  REQUIRE(again.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].bound_bits == again[i].bound_bits);
    CHECK(rows[i].measured_bits == again[i].measured_bits);
    CHECK(rows[i].margin_bits == again[i].margin_bits);
    CHECK(rows[i].dbar == again[i].dbar);
    CHECK(rows[i].c == again[i].c);
  }
}
