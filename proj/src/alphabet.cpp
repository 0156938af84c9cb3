#include "slb/alphabet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "slb/errors.hpp"

namespace slb {

namespace {

Quadrature composite_simpson(double lower, double upper, int n) {
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double h = (upper - lower) / (n - 1);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = lower + h * i;
    double w;
    if (i == 0 || i == n - 1)
      w = 1.0;
    else if (i % 2 == 1)
      w = 4.0;
    else
      w = 2.0;
    q.weights[i] = w * h / 3.0;
  }
  q.nodes[n - 1] = upper;
  return q;
}

// Gauss-Legendre nodes by Newton iteration on the Legendre polynomial,
// exploiting root symmetry about the midpoint.
Quadrature gauss_legendre(double lower, double upper, int n) {
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double xm = 0.5 * (upper + lower);
  const double xl = 0.5 * (upper - lower);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    q.nodes[i] = xm - xl * z;
    q.nodes[n - 1 - i] = xm + xl * z;
    const double w = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = xm;  // symmetry; kills rounding drift
  return q;
}

}  // namespace

Quadrature make_quadrature(double lower, double upper, int node_count,
                           QuadratureRule rule) {
  if (!(lower < upper)) throw DomainError("quadrature: lower must be < upper");
  if (node_count < 3) throw DomainError("quadrature: need at least 3 nodes");
  if (node_count % 2 == 0) ++node_count;
  if (rule == QuadratureRule::CompositeSimpson)
    return composite_simpson(lower, upper, node_count);
  return gauss_legendre(lower, upper, node_count);
}

Alphabet Alphabet::discrete(std::vector<double> symbols, bool modular) {
  if (symbols.size() < 2)
    throw DomainError("alphabet: need at least 2 symbols");
  std::set<double> uniq(symbols.begin(), symbols.end());
  if (uniq.size() != symbols.size())
    throw DomainError("alphabet: symbols must be distinct");
  if (modular) {
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (symbols[i] != static_cast<double>(i))
        throw DomainError("alphabet: modular symbols must be 0..K-1 in order");
    }
  }
  Alphabet a;
  a.kind_ = Kind::Discrete;
  a.modular_ = modular;
  a.lower_ = *std::min_element(symbols.begin(), symbols.end());
  a.upper_ = *std::max_element(symbols.begin(), symbols.end());
  a.weights_.assign(symbols.size(), 1.0);
  a.nodes_ = std::move(symbols);
  return a;
}

Alphabet Alphabet::binary() { return discrete({0.0, 1.0}, true); }

Alphabet Alphabet::continuous_interval(double lower, double upper,
                                       int node_count, QuadratureRule rule) {
  if (!(lower < upper)) throw DomainError("alphabet: lower must be < upper");
  if (node_count < 16)
    throw DomainError("alphabet: continuous alphabets need >= 16 nodes");
  Alphabet a;
  a.kind_ = Kind::ContinuousInterval;
  a.lower_ = lower;
  a.upper_ = upper;
  a.rule_ = rule;
  Quadrature q = make_quadrature(lower, upper, node_count, rule);
  a.nodes_ = std::move(q.nodes);
  a.weights_ = std::move(q.weights);
  return a;
}

double Alphabet::difference(double u, double v) const {
  if (modular_) {
    const int k = static_cast<int>(nodes_.size());
    int d = static_cast<int>(std::lround(u)) - static_cast<int>(std::lround(v));
    d %= k;
    if (d < 0) d += k;
    return static_cast<double>(d);
  }
  return u - v;
}

std::size_t Alphabet::symbol_index(double value) const {
  if (!is_discrete())
    throw DomainError("symbol_index: continuous alphabets have no symbols");
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i] == value) return i;
  throw DomainError("symbol_index: value is not an alphabet symbol");
}

}  // namespace slb
