#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slb/alphabet.hpp"
#include "slb/distortion.hpp"
#include "slb/errors.hpp"
#include "slb/phi.hpp"
#include "oracles.hpp"

using namespace slb;

namespace {

Alphabet wide(double half, int nodes) {
  return Alphabet::continuous_interval(-half, half, nodes,
                                       QuadratureRule::CompositeSimpson);
}

}  // namespace

TEST_CASE("squared error rate floor matches half log2(2 pi e D)") {
  const Alphabet a = wide(16.0, 16001);
  for (double D : {0.1, 0.5, 1.0, 2.0}) {
    DistortionSpec spec = make_spec({square_distortion()}, {D});
    const PhiResult r = phi(a, spec, spec.levels);
    const double closed = 0.5 * std::log2(2 * std::numbers::pi *
                                          std::numbers::e * D);
    CHECK(r.phi == doctest::Approx(closed).epsilon(1e-7));
    CHECK(r.beta_star[0] ==
          doctest::Approx(1.0 / (2 * D * std::numbers::ln2)).epsilon(1e-5));
    CHECK(r.converged);
    CHECK_FALSE(r.degenerate);
  }
}

TEST_CASE("absolute error rate floor matches log2(2 e D)") {
  const Alphabet a = wide(60.0, 24001);
  for (double D : {0.1, 0.5, 1.0, 2.0}) {
    DistortionSpec spec = make_spec({abs_distortion()}, {D});
    const PhiResult r = phi(a, spec, spec.levels);
    CHECK(r.phi ==
          doctest::Approx(std::log2(2 * std::numbers::e * D)).epsilon(1e-7));
    // s* = 1/D, so beta* = 1/(D ln 2).
    CHECK(r.beta_star[0] ==
          doctest::Approx(1.0 / (D * std::numbers::ln2)).epsilon(1e-5));
  }
}

TEST_CASE("binary hamming rate floor equals the binary entropy") {
  const Alphabet a = Alphabet::binary();
  for (double D : {0.05, 0.15, 0.25, 0.4, 0.45}) {
    DistortionSpec spec = make_spec({hamming_distortion()}, {D});
    const PhiResult r = phi(a, spec, spec.levels);
    CHECK(r.phi ==
          doctest::Approx(oracle::binary_entropy_bits(D)).epsilon(1e-10));
    CHECK(r.beta_star[0] ==
          doctest::Approx(std::log2((1 - D) / D)).epsilon(1e-6));
  }
}

TEST_CASE("degenerate level above the uniform mean gives zero tilt") {
  const Alphabet a = Alphabet::binary();
  // Uniform mean distortion is 1/2; any level past it leaves beta at zero.
  DistortionSpec spec = make_spec({hamming_distortion()}, {0.75});
  const PhiResult r = phi(a, spec, spec.levels);
  CHECK(r.degenerate);
  CHECK(r.phi == doctest::Approx(1.0));  // log2 of the alphabet size
}

TEST_CASE("level at the floor of a discrete alphabet hits the point mass") {
  const Alphabet a = Alphabet::discrete({0, 1, 2, 3}, true);
  DistortionSpec spec = make_spec({hamming_distortion()}, {0.0});
  const PhiResult r = phi(a, spec, spec.levels);
  CHECK(r.at_floor);
  CHECK(r.phi == doctest::Approx(0.0));
}

TEST_CASE("level below the floor is rejected") {
  const Alphabet a = Alphabet::binary();
  DistortionSpec spec = make_spec({hamming_distortion()}, {-0.5});
  CHECK_THROWS_AS(phi(a, spec, spec.levels), DivergenceError);
}

TEST_CASE("tilted family is the entropy maximizer at the optimum") {
  const Alphabet a = wide(16.0, 16001);
  DistortionSpec spec = make_spec({square_distortion()}, {0.7});
  const PhiResult r = phi(a, spec, spec.levels);
  const MaxEntCheck c = maxent_check(r, a, spec, spec.levels);
  REQUIRE(c.applicable);
  CHECK(c.entropy_gap_bits <= 1e-6);
  CHECK(c.moment_gaps[0] <= 1e-6);
}

TEST_CASE("two-constraint problem with a correlation term") {
  // rho_1 = z^2, rho_2 = -z z'.  The optimum exists and both multipliers
  // stay positive when the correlation level is demanding enough.
  const Alphabet a = wide(12.0, 3001);
  DistortionSpec spec =
      make_spec({square_distortion(), neg_correlation()}, {1.0, -0.2});
  // neg_correlation spans two letters, so this spec is not single-letter and
  // phi must refuse it.
  CHECK_THROWS_AS(phi(a, spec, spec.levels), DomainError);
}

TEST_CASE("duplicated constraints are flagged as dependent") {
  const Alphabet a = wide(16.0, 4001);
  DistortionSpec spec =
      make_spec({square_distortion(), square_distortion()}, {0.5, 0.5});
  const PhiResult r = phi(a, spec, spec.levels);
  // Same function twice: the covariance of the active pair is singular.
  CHECK(r.dependent_constraints);
  // The value still matches the single-constraint problem at level 0.5 since
  // the pair of tilts acts through their sum.
  DistortionSpec one = make_spec({square_distortion()}, {0.5});
  const PhiResult r1 = phi(a, one, one.levels);
  CHECK(r.phi == doctest::Approx(r1.phi).epsilon(1e-6));
}

TEST_CASE("gaussian distortion-rate bound at rate R") {
  // h = half log2(2 pi e sigma^2) for a gaussian source; the bound equals
  // sigma^2 2^{-2R} with squared error.
  const double sigma2 = 1.0;
  const double h = 0.5 * std::log2(2 * std::numbers::pi * std::numbers::e *
                                   sigma2);
  const Alphabet a = wide(16.0, 16001);
  DistortionSpec spec = make_spec({square_distortion()}, {1.0});
  for (double R : {0.5, 1.0, 2.0}) {
    const double d = distortion_rate_bound(a, spec, R, h);
    CHECK(d == doctest::Approx(sigma2 * std::exp2(-2 * R)).epsilon(1e-6));
  }
}

TEST_CASE("distortion-rate bound clamps to zero when the rate exceeds entropy") {
  const Alphabet a = Alphabet::binary();
  DistortionSpec spec = make_spec({hamming_distortion()}, {0.1});
  const double d = distortion_rate_bound(a, spec, 2.0, 1.0);
  CHECK(d == doctest::Approx(0.0));
}

TEST_CASE("interval suggestion confines the tilted mass") {
  DistortionSpec spec = make_spec({square_distortion()}, {1.0});
  const std::vector<double> beta_min = {0.1};
  const Alphabet a = suggest_truncated_interval(spec, beta_min, 2001);
  CHECK(a.lower() < -10.0);
  CHECK(a.upper() > 10.0);
  // The suggested window must already capture the gaussian integral.
  const double s = 0.1 * std::numbers::ln2;
  const double logz = log_partition_nat(a, spec, std::span(&s, 1));
  CHECK(logz == doctest::Approx(0.5 * std::log(std::numbers::pi / s))
                    .epsilon(1e-8));
}

TEST_CASE("gradient of the log partition matches finite differences") {
  const Alphabet a = wide(16.0, 8001);
  DistortionSpec spec = make_spec({square_distortion()}, {1.0});
  const double beta0 = 0.9;
  auto g_of_beta = [&](double b) {
    const std::vector<double> beta = {b};
    return log_partition(a, spec, beta).value;
  };
  const std::vector<double> beta = {beta0};
  const LogPartition lp = log_partition(a, spec, beta);
  CHECK(lp.gradient[0] ==
        doctest::Approx(oracle::derivative(g_of_beta, beta0)).epsilon(1e-6));
  // Second derivative equals ln2 times the tilted variance.
  CHECK(std::numbers::ln2 * lp.covariance[0][0] ==
        doctest::Approx(oracle::second_derivative(g_of_beta, beta0))
            .epsilon(1e-4));
}
