#include "slb/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "slb/errors.hpp"

namespace slb::linalg {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void matvec_flat(const std::vector<double>& a, std::size_t dim,
                 std::span<const double> x, std::vector<double>& y) {
  y.assign(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    const double* row = a.data() + i * dim;
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

SymEigen jacobi_eigenvalues(Matrix a, int max_sweeps) {
  const std::size_t n = a.size();
  for (const auto& row : a) {
    if (row.size() != n) throw DomainError("jacobi: matrix must be square");
  }
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
      }
    }
  }
  SymEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i][i];
  std::sort(out.values.begin(), out.values.end());
  return out;
}

double sym_determinant(const Matrix& a) {
  double det = 1.0;
  for (double v : jacobi_eigenvalues(a).values) det *= v;
  return det;
}

std::vector<double> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DomainError("solve: shape mismatch");
  for (const auto& row : a) {
    if (row.size() != n) throw DomainError("solve: matrix must be square");
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a[i][col]) > std::abs(a[pivot][col])) pivot = i;
    if (std::abs(a[pivot][col]) < 1e-300)
      throw SingularHessianError("solve: singular system");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t i = col + 1; i < n; ++i) {
      const double m = a[i][col] / a[col][col];
      if (m == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[i][j] -= m * a[col][j];
      b[i] -= m * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace slb::linalg
