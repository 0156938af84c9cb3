#include "slb/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "slb/errors.hpp"

namespace slb {

WindowFunction abs_distortion() {
  WindowFunction f;
  f.window = 1;
  f.eval = [](std::span<const double> z) { return std::abs(z[0]); };
  f.label = "abs";
  f.descriptor = "abs";
  return f;
}

WindowFunction square_distortion() {
  WindowFunction f;
  f.window = 1;
  f.eval = [](std::span<const double> z) { return z[0] * z[0]; };
  f.label = "square";
  f.descriptor = "square";
  return f;
}

WindowFunction hamming_distortion() {
  WindowFunction f;
  f.window = 1;
  f.eval = [](std::span<const double> z) { return z[0] == 0.0 ? 0.0 : 1.0; };
  f.label = "hamming";
  f.descriptor = "hamming";
  return f;
}

WindowFunction neg_correlation() {
  WindowFunction f;
  f.window = 2;
  f.eval = [](std::span<const double> z) { return -z[0] * z[1]; };
  f.label = "negcorr";
  f.descriptor = "negcorr";
  return f;
}

WindowFunction make_iwf(double radius) {
  if (!(radius > 0.0)) throw DomainError("iwf: radius must be positive");
  WindowFunction f;
  f.window = 1;
  f.eval = [radius](std::span<const double> z) {
    return std::abs(z[0]) <= radius ? 0.0 : kInfiniteDistortion;
  };
  f.label = "iwf";
  f.shape = WindowFunction::Shape::InfiniteWell;
  f.well_radius = radius;
  char buf[48];
  std::snprintf(buf, sizeof buf, "iwf(%.17g)", radius);
  f.descriptor = buf;
  return f;
}

WindowFunction table_distortion(std::vector<double> values) {
  if (values.empty()) throw DomainError("table: empty value list");
  if (values[0] != 0.0) throw DomainError("table: value at 0 must be 0");
  for (double v : values) {
    if (std::isnan(v) || v < 0.0)
      throw DomainError("table: values must be nonnegative");
  }
  WindowFunction f;
  f.window = 1;
  std::string desc = "table:[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", values[i]);
    desc += buf;
  }
  desc += "]";
  f.eval = [values = std::move(values)](std::span<const double> z) {
    const auto i = static_cast<std::size_t>(std::lround(z[0]));
    if (z[0] < -0.5 || i >= values.size())
      throw DomainError("table: difference value outside table range");
    return values[i];
  };
  f.label = "table";
  f.descriptor = std::move(desc);
  return f;
}

WindowFunction table_distortion2(std::vector<std::vector<double>> values) {
  if (values.empty()) throw DomainError("table2: empty value matrix");
  const std::size_t k = values.size();
  for (const auto& row : values) {
    if (row.size() != k) throw DomainError("table2: matrix must be square");
    for (double v : row) {
      if (std::isnan(v)) throw DomainError("table2: NaN entry");
    }
  }
  WindowFunction f;
  f.window = 2;
  f.eval = [values = std::move(values), k](std::span<const double> z) {
    const auto i = static_cast<std::size_t>(std::lround(z[0]));
    const auto j = static_cast<std::size_t>(std::lround(z[1]));
    if (z[0] < -0.5 || z[1] < -0.5 || i >= k || j >= k)
      throw DomainError("table2: difference value outside table range");
    return values[i][j];
  };
  f.label = "table2";
  f.descriptor = "table2";
  return f;
}

int DistortionSpec::common_window() const {
  int m = 1;
  for (const auto& f : functions) m = std::max(m, f.window);
  return m;
}

DistortionSpec make_spec(std::vector<WindowFunction> functions,
                         std::vector<double> levels) {
  if (functions.empty()) throw DomainError("spec: need at least one term");
  if (functions.size() != levels.size())
    throw DomainError("spec: one level per window function");
  for (const auto& f : functions) {
    if (f.window < 1) throw DomainError("spec: window must be >= 1");
    if (!f.eval) throw DomainError("spec: missing evaluator");
    if (f.window == 1) {
      const double zero = 0.0;
      if (f.eval(std::span<const double>(&zero, 1)) != 0.0)
        throw DomainError("spec: m=1 distortion must vanish at 0 (" + f.label +
                          ")");
    }
  }
  DistortionSpec s;
  s.functions = std::move(functions);
  s.levels = std::move(levels);
  return s;
}

std::vector<double> eval_distortion(std::span<const double> z,
                                    const DistortionSpec& spec) {
  const int m = spec.common_window();
  const auto n = static_cast<int>(z.size());
  if (n < m)
    throw LengthError("eval_distortion: sequence shorter than window " +
                      std::to_string(m));
  std::vector<double> totals(spec.k(), 0.0);
  for (int t = m - 1; t < n; ++t) {
    for (std::size_t j = 0; j < spec.k(); ++j) {
      const int mj = spec.functions[j].window;
      const double v =
          spec.functions[j].eval(z.subspan(static_cast<std::size_t>(t - mj + 1),
                                           static_cast<std::size_t>(mj)));
      totals[j] += v;  // +inf propagates
    }
  }
  return totals;
}

}  // namespace slb
