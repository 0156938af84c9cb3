#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "slb/alphabet.hpp"

namespace slb {

// Sentinel for forbidden differences.  It always enters partition sums as
// weight zero when its tilt is positive; it is never approximated by a large
// finite float.
inline constexpr double kInfiniteDistortion =
    std::numeric_limits<double>::infinity();

// A per-window distortion term rho: U^m -> [0, +inf].  For m == 1 the value
// at 0 must be 0.  Infinite-well functions carry their radius so partition
// code can restrict integration domains exactly instead of integrating
// through a jump.
struct WindowFunction {
  enum class Shape { Generic, InfiniteWell };

  int window = 1;
  std::function<double(std::span<const double>)> eval;
  std::string label;
  Shape shape = Shape::Generic;
  double well_radius = 0.0;    // InfiniteWell only
  std::string descriptor;      // serialized form, e.g. "square", "iwf(1.5)"
};

WindowFunction abs_distortion();          // |z|
WindowFunction square_distortion();       // z^2
WindowFunction hamming_distortion();      // 1{z != 0}
WindowFunction neg_correlation();         // m=2, -z*z'
// W(|z| - A): 0 inside the closed well of radius A, +inf outside.
WindowFunction make_iwf(double radius);
// m=1 table over a modular alphabet's difference values 0..K-1.
WindowFunction table_distortion(std::vector<double> values);
// m=2 table over modular difference pairs; values[z][z'].
WindowFunction table_distortion2(std::vector<std::vector<double>> values);

// A vector of window distortion terms with their constraint levels.  The
// common window is the maximum single window; shorter windows are evaluated
// on the trailing arguments of the common window, which drops their first
// (m - m_j) sliding terms.  Reports that mix windows carry that convention.
struct DistortionSpec {
  std::vector<WindowFunction> functions;
  std::vector<double> levels;

  std::size_t k() const { return functions.size(); }
  int common_window() const;
  bool single_letter() const { return common_window() == 1; }
};

DistortionSpec make_spec(std::vector<WindowFunction> functions,
                         std::vector<double> levels);

// Sliding totals (sum_{t=m}^{n} rho_j(z_{t-m_j+1}^t))_{j=1..k} over a
// difference sequence z of length n >= common window m.
std::vector<double> eval_distortion(std::span<const double> z,
                                    const DistortionSpec& spec);

}  // namespace slb
