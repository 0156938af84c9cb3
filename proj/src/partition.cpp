#include "slb/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slb/errors.hpp"

namespace slb {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void check_single_letter(const DistortionSpec& spec) {
  if (!spec.single_letter())
    throw DomainError("partition: spec must be single-letter (m = 1)");
}

void check_tilt(const DistortionSpec& spec, std::span<const double> s) {
  if (s.size() != spec.k())
    throw DomainError("partition: tilt dimension must match spec");
  for (double v : s) {
    if (std::isnan(v) || v < 0.0)
      throw DomainError("partition: tilts must be nonnegative");
  }
}

double rho_at(const DistortionSpec& spec, std::size_t j, double z) {
  return spec.functions[j].eval(std::span<const double>(&z, 1));
}

}  // namespace

Grid effective_grid(const Alphabet& alphabet, const DistortionSpec& spec,
                    std::span<const double> s_nat) {
  check_single_letter(spec);
  check_tilt(spec, s_nat);

  double well = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < spec.k(); ++j) {
    if (spec.functions[j].shape == WindowFunction::Shape::InfiniteWell &&
        s_nat[j] > 0.0)
      well = std::min(well, spec.functions[j].well_radius);
  }

  Grid g;
  if (std::isinf(well)) {
    g.nodes = alphabet.nodes();
    g.weights = alphabet.weights();
    return g;
  }

  if (alphabet.is_discrete()) {
    for (std::size_t q = 0; q < alphabet.size(); ++q) {
      if (std::abs(alphabet.nodes()[q]) <= well) {
        g.nodes.push_back(alphabet.nodes()[q]);
        g.weights.push_back(alphabet.weights()[q]);
      }
    }
    if (g.nodes.empty())
      throw DivergenceError(
          "partition: infinite-well constraint leaves no alphabet support");
    return g;
  }

  const double lo = std::max(alphabet.lower(), -well);
  const double hi = std::min(alphabet.upper(), well);
  if (!(lo < hi))
    throw DivergenceError(
        "partition: infinite-well constraint leaves an empty interval");
  Quadrature q = make_quadrature(lo, hi, alphabet.node_count(), alphabet.rule());
  g.nodes = std::move(q.nodes);
  g.weights = std::move(q.weights);
  return g;
}

TiltedMoments tilted_moments(const Alphabet& alphabet,
                             const DistortionSpec& spec,
                             std::span<const double> s_nat, bool want_cov) {
  const Grid grid = effective_grid(alphabet, spec, s_nat);
  const std::size_t k = spec.k();

  double z_sum = 0.0;
  std::vector<double> m1(k, 0.0);
  linalg::Matrix m2;
  if (want_cov) m2.assign(k, std::vector<double>(k, 0.0));
  std::vector<double> rho(k);

  for (std::size_t q = 0; q < grid.nodes.size(); ++q) {
    double expo = 0.0;
    bool dead = false;
    for (std::size_t j = 0; j < k; ++j) {
      rho[j] = rho_at(spec, j, grid.nodes[q]);
      if (std::isinf(rho[j])) {
        if (s_nat[j] > 0.0) {
          dead = true;  // weight exactly zero
          break;
        }
        throw DivergenceError(
            "partition: constraint '" + spec.functions[j].label +
            "' has infinite distortion mass at zero tilt");
      }
      expo -= s_nat[j] * rho[j];
    }
    if (dead) continue;
    const double w = grid.weights[q] * std::exp(expo);
    if (w == 0.0) continue;
    z_sum += w;
    for (std::size_t i = 0; i < k; ++i) {
      m1[i] += w * rho[i];
      if (want_cov)
        for (std::size_t j = i; j < k; ++j) m2[i][j] += w * rho[i] * rho[j];
    }
  }

  if (!(z_sum > 0.0) || !std::isfinite(z_sum))
    throw DivergenceError("partition: sum is not finite and positive");

  TiltedMoments out;
  out.log_z_nat = std::log(z_sum);
  out.mean.resize(k);
  for (std::size_t i = 0; i < k; ++i) out.mean[i] = m1[i] / z_sum;
  if (want_cov) {
    out.cov.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) {
        const double c = m2[i][j] / z_sum - out.mean[i] * out.mean[j];
        out.cov[i][j] = c;
        out.cov[j][i] = c;
      }
  }
  return out;
}

double log_partition_nat(const Alphabet& alphabet, const DistortionSpec& spec,
                         std::span<const double> s_nat) {
  const Grid grid = effective_grid(alphabet, spec, s_nat);
  const std::size_t k = spec.k();
  double z_sum = 0.0;
  for (std::size_t q = 0; q < grid.nodes.size(); ++q) {
    double expo = 0.0;
    bool dead = false;
    for (std::size_t j = 0; j < k; ++j) {
      const double r = rho_at(spec, j, grid.nodes[q]);
      if (std::isinf(r)) {
        if (s_nat[j] > 0.0) {
          dead = true;
          break;
        }
        continue;  // zero tilt: the term contributes nothing to the exponent
      }
      expo -= s_nat[j] * r;
    }
    if (dead) continue;
    z_sum += grid.weights[q] * std::exp(expo);
  }
  if (!(z_sum > 0.0) || !std::isfinite(z_sum))
    throw DivergenceError("partition: sum is not finite and positive");
  return std::log(z_sum);
}

double TiltedDensity::entropy_bits() const {
  double h = 0.0;
  for (std::size_t q = 0; q < grid.nodes.size(); ++q) {
    const double g = density[q];
    if (g > 0.0) h -= grid.weights[q] * g * std::log2(g);
  }
  return h;
}

std::vector<double> TiltedDensity::expected_distortion(
    const DistortionSpec& spec) const {
  std::vector<double> e(spec.k(), 0.0);
  for (std::size_t q = 0; q < grid.nodes.size(); ++q) {
    if (density[q] == 0.0) continue;
    for (std::size_t j = 0; j < spec.k(); ++j) {
      const double r = rho_at(spec, j, grid.nodes[q]);
      if (std::isinf(r)) continue;  // zero density mass there by construction
      e[j] += grid.weights[q] * density[q] * r;
    }
  }
  return e;
}

TiltedDensity make_tilted(const Alphabet& alphabet, const DistortionSpec& spec,
                          std::span<const double> beta_bits) {
  check_single_letter(spec);
  std::vector<double> s(beta_bits.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = beta_bits[j] * kLn2;
  check_tilt(spec, s);

  TiltedDensity d;
  d.grid = effective_grid(alphabet, spec, s);
  d.beta.assign(beta_bits.begin(), beta_bits.end());
  d.density.resize(d.grid.nodes.size());

  double z_sum = 0.0;
  for (std::size_t q = 0; q < d.grid.nodes.size(); ++q) {
    double expo = 0.0;
    bool dead = false;
    for (std::size_t j = 0; j < spec.k(); ++j) {
      const double r = rho_at(spec, j, d.grid.nodes[q]);
      if (std::isinf(r)) {
        if (s[j] > 0.0) {
          dead = true;
          break;
        }
        continue;
      }
      expo -= s[j] * r;
    }
    const double v = dead ? 0.0 : std::exp(expo);
    d.density[q] = v;
    z_sum += d.grid.weights[q] * v;
  }
  if (!(z_sum > 0.0) || !std::isfinite(z_sum))
    throw DivergenceError("tilted density: partition sum is not positive");
  for (double& v : d.density) v /= z_sum;
  d.log_z_bits = std::log2(z_sum);
  return d;
}

DistortionFloor distortion_floor(const Alphabet& alphabet,
                                 const DistortionSpec& spec, std::size_t j) {
  check_single_letter(spec);
  if (j >= spec.k()) throw DomainError("distortion_floor: index out of range");
  DistortionFloor f;
  f.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < alphabet.size(); ++q) {
    const double r = rho_at(spec, j, alphabet.nodes()[q]);
    if (r < f.min_value - 1e-12) {
      f.min_value = r;
      f.weight_at_min = alphabet.weights()[q];
    } else if (r <= f.min_value + 1e-12) {
      f.weight_at_min += alphabet.weights()[q];
    }
  }
  return f;
}

}  // namespace slb
