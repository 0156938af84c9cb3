#pragma once

#include <span>
#include <vector>

namespace slb {

enum class QuadratureRule { CompositeSimpson, GaussLegendre };

// Nodes and positive weights of a quadrature rule on [lower, upper].
// Weights sum to (upper - lower) for both supported rules.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// node_count is rounded up to the next odd value so that the interval
// midpoint is a node (and, for Simpson, a panel boundary); integrands with a
// kink at 0 then keep the rule's full order on symmetric intervals.
Quadrature make_quadrature(double lower, double upper, int node_count,
                           QuadratureRule rule);

// A source/reproduction alphabet.  Discrete alphabets are finite lists of
// real symbol values; "modular" ones are exactly {0, ..., K-1} with mod-K
// subtraction, which is the setting block-code enumeration assumes.
// Continuous alphabets are truncated intervals carrying their quadrature
// grid; every integral in the library is taken over that grid.
class Alphabet {
 public:
  enum class Kind { Discrete, ContinuousInterval };

  static Alphabet discrete(std::vector<double> symbols, bool modular = false);
  static Alphabet binary();  // {0,1}, modular
  static Alphabet continuous_interval(
      double lower, double upper, int node_count,
      QuadratureRule rule = QuadratureRule::CompositeSimpson);

  Kind kind() const { return kind_; }
  bool is_discrete() const { return kind_ == Kind::Discrete; }
  bool modular() const { return modular_; }

  // Grid view: symbol values with unit weights (discrete), or quadrature
  // nodes and weights (continuous).
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  QuadratureRule rule() const { return rule_; }

  // Group difference u - v: mod-K for modular alphabets, plain subtraction
  // otherwise.
  double difference(double u, double v) const;

  // Position of an exact symbol value; discrete alphabets only.
  std::size_t symbol_index(double value) const;

 private:
  Alphabet() = default;

  Kind kind_ = Kind::Discrete;
  bool modular_ = false;
  double lower_ = 0.0;
  double upper_ = 0.0;
  QuadratureRule rule_ = QuadratureRule::CompositeSimpson;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace slb
