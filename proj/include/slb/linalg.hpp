#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Small dense helpers for the k x k matrices (k <= a handful) that show up in
// saddle-point Hessians, plus the mat-vec used by power iteration.  Nothing
// here is tuned; sizes are tiny or the operation is a single pass.

namespace slb::linalg {

using Matrix = std::vector<std::vector<double>>;

double dot(std::span<const double> a, std::span<const double> b);

// y = A x for a square row-major dense matrix stored flat.
void matvec_flat(const std::vector<double>& a, std::size_t dim,
                 std::span<const double> x, std::vector<double>& y);

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi sweeps.
// Adequate for the tiny matrices used here; throws on non-square input.
struct SymEigen {
  std::vector<double> values;  // ascending
};

SymEigen jacobi_eigenvalues(Matrix a, int max_sweeps = 64);

// Determinant of a symmetric positive matrix via its eigenvalues.
double sym_determinant(const Matrix& a);

// Solves A x = b by Gaussian elimination with partial pivoting.
// Throws on singular (pivot below 1e-300) or mismatched shapes.
std::vector<double> solve(Matrix a, std::vector<double> b);

}  // namespace slb::linalg
