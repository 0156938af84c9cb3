#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "slb/alphabet.hpp"
#include "slb/bounds.hpp"
#include "slb/distortion.hpp"
#include "slb/errors.hpp"
#include "oracles.hpp"

using namespace slb;

namespace {

BoundInputs gaussian_inputs(double D, int n) {
  BoundInputs in;
  in.h_rate_bits = gaussian_entropy_rate(1.0);
  in.n = n;
  in.alphabet = Alphabet::continuous_interval(-16.0, 16.0, 801,
                                              QuadratureRule::GaussLegendre);
  in.spec = make_spec({square_distortion()}, {D});
  return in;
}

}  // namespace

TEST_CASE("entropy rates of the builtin sources") {
  CHECK(gaussian_entropy_rate(1.0) ==
        doctest::Approx(0.5 * std::log2(2.0 * std::numbers::pi *
                                        std::numbers::e))
            .epsilon(1e-15));
  CHECK(uniform_entropy_rate(2.0) == doctest::Approx(1.0));
  CHECK(uniform_entropy_rate(1.0) == doctest::Approx(0.0));
  CHECK(bernoulli_entropy_rate(0.5) == doctest::Approx(1.0));
  CHECK(bernoulli_entropy_rate(0.11) ==
        doctest::Approx(oracle::binary_entropy_bits(0.11)).epsilon(1e-15));
  CHECK(bernoulli_entropy_rate(0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(gaussian_entropy_rate(0.0), DomainError);
}

TEST_CASE("classical bound is tight for the gaussian-quadratic pair") {
  for (double D : {0.1, 0.25, 0.5}) {
    const BoundInputs in = gaussian_inputs(D, 100);
    CHECK(slb_classical(in) ==
          doctest::Approx(0.5 * std::log2(1.0 / D)).epsilon(1e-9));
  }
}

TEST_CASE("classical bound vanishes when the rate matches the entropy") {
  BoundInputs in;
  in.h_rate_bits = bernoulli_entropy_rate(0.11);
  in.n = 100;
  in.alphabet = Alphabet::binary();
  in.spec = make_spec({hamming_distortion()}, {0.11});
  CHECK(std::abs(slb_classical(in)) <= 1e-9);
}

TEST_CASE("classical bound is nonincreasing in the budget") {
  double prev = 1e300;
  for (double D : {0.05, 0.1, 0.2, 0.5, 1.0}) {
    const double v = slb_classical(gaussian_inputs(D, 100));
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("lagrangian bound touches the classical value at the dual tilt") {
  const BoundInputs in = gaussian_inputs(0.1, 100);
  const PhiResult pr = phi(in.alphabet, in.spec, in.spec.levels);
  const double classical = slb_classical(in);
  const double touched = lagrangian_bound(in, pr.beta_star);
  CHECK(touched ==
        doctest::Approx(classical + pr.beta_star[0] * 0.1).epsilon(1e-6));

  BoundInputs disc;
  disc.h_rate_bits = 1.0;
  disc.alphabet = Alphabet::binary();
  disc.spec = make_spec({hamming_distortion()}, {0.25});
  const std::vector<double> zero = {0.0};
  CHECK(lagrangian_bound(disc, zero) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("length-spectrum refinement at the pinned block length") {
  const OneToOneBound b = slb_one_to_one(1.0, 1000);
  CHECK(b.value_bits >= 0.9880);
  CHECK(b.value_bits <= 0.9890);
  CHECK(b.alpha_star > 1.0005);
  CHECK(b.alpha_star < 1.0030);
  CHECK(b.gap_bits == doctest::Approx(1.0 - b.value_bits));
  CHECK(b.gap_bits > 0.0);
}

TEST_CASE("length-spectrum refinement approaches the base") {
  const OneToOneBound big = slb_one_to_one(1.0, 10000000);
  CHECK(std::abs(big.value_bits - 1.0) <= 1e-4);
  double prev_gap = 1e300;
  for (int n : {100, 1000, 10000}) {
    const OneToOneBound b = slb_one_to_one(1.0, n);
    CHECK(b.gap_bits < prev_gap);
    prev_gap = b.gap_bits;
  }
  CHECK_THROWS_AS(slb_one_to_one(1.0, 1), DomainError);
}

TEST_CASE("gap follows c log2(n)/n across two decades") {
  const std::vector<int> ns = {100, 1000, 10000};
  const GapFit fit = fit_one_to_one_gap(1.0, ns);
  CHECK(fit.c > 0.0);
  CHECK(fit.max_rel_residual <= 0.10);
  for (int n : ns) {
    const OneToOneBound b = slb_one_to_one(1.0, n);
    const double model = fit.c * std::log2(double(n)) / double(n);
    CHECK(std::abs(model - b.gap_bits) <= fit.max_rel_residual * b.gap_bits +
                                              1e-15);
  }
}

TEST_CASE("cover-bound refinement term is exact formula arithmetic") {
  CHECK(dsf_refinement_term(1, 100) == std::log2(100.0) / 200.0);
  CHECK(dsf_refinement_term(1, 100) == doctest::Approx(0.0332192809489));
  CHECK(dsf_refinement_term(2, 100) == 2.0 * dsf_refinement_term(1, 100));
}

TEST_CASE("cover bound via the volume estimate matches the exact volume") {
  BoundInputs in;
  in.h_rate_bits = 3.0;
  in.n = 100;
  in.alphabet = Alphabet::continuous_interval(
      -60.0, 60.0, 24001, QuadratureRule::CompositeSimpson);
  in.spec = make_spec({abs_distortion()}, {1.0});
  SaddleResult sad = find_saddle(in.alphabet, in.spec, in.spec.levels);
  const VolumeEstimate vol = log_volume_saddle(100, sad, in.alphabet);
  const double via_saddle = slb_dsf(in, vol);
  const VolumeEstimate exact = exact_volume(100, in.alphabet, in.spec, 1.0);
  const double via_exact = slb_dsf(in, exact);
  CHECK(std::abs(via_saddle - via_exact) <= 2e-5);
  CHECK(via_exact == doctest::Approx(3.0 - 2.3962063).epsilon(1e-6));

  const PhiResult pr = phi(in.alphabet, in.spec, in.spec.levels);
  const double via_chernoff = slb_dsf(in, chernoff_log_volume(100, pr));
  CHECK(via_chernoff == doctest::Approx(slb_classical(in)).epsilon(1e-12));
}

TEST_CASE("ordering certificate on gaussian inputs") {
  for (int n : {10, 100}) {
    const BoundReport rep = ordering_check(gaussian_inputs(0.1, n));
    REQUIRE(rep.entries.size() == 3);
    CHECK(rep.ordering_certificate);
    CHECK(rep.violation.empty());
    CHECK(rep.entries[0].variant == "one-to-one");
    CHECK(rep.entries[1].variant == "classical");
    CHECK(rep.entries[2].variant == "d-semifaithful");
    CHECK(rep.entries[0].value_bits < rep.entries[1].value_bits);
    CHECK(rep.entries[1].value_bits < rep.entries[2].value_bits);
    CHECK(rep.entries[2].redundancy_bits == dsf_refinement_term(1, n));
    CHECK(rep.entries[0].redundancy_bits > 0.0);
  }
}

TEST_CASE("ordering clamps consistently at the degenerate boundary") {
  BoundInputs in;
  in.h_rate_bits = 1.0;
  in.n = 10;
  in.alphabet = Alphabet::binary();
  in.spec = make_spec({hamming_distortion()}, {0.75});
  const BoundReport rep = ordering_check(in);
  CHECK(rep.ordering_certificate);
  for (const BoundEntry& e : rep.entries)
    CHECK(e.value_bits == doctest::Approx(0.0).epsilon(1e-12));

  in.h_rate_bits = bernoulli_entropy_rate(0.2);
  const BoundReport neg = ordering_check(in);
  CHECK(neg.ordering_certificate);
  CHECK(neg.entries[1].clamped);
  CHECK(neg.entries[1].value_bits == 0.0);
}
