#pragma once

// Dense helpers on top of Eigen: Hermitian eigendecomposition, ranks,
// null spaces, range-restricted whitening and least squares.

#include "qstar/core.hpp"

namespace qstar::linalg {

struct HermitianEigen {
  RealVector values; // ascending
  Matrix vectors;    // columns
};

/// Eigendecomposition of the Hermitian part (M + M^H)/2.
HermitianEigen hermitian_eigen(const Matrix& m);

/// Largest singular value; 0 for empty matrices.
double spectral_norm(const Matrix& m);

/// Number of singular values above rel * sigma_max.
int numerical_rank(const Matrix& m, double rel);

/// Orthonormal basis (columns) of {v : m v ~ 0}, singular values at or below
/// rel * sigma_max treated as zero. A zero matrix has the full null space.
Matrix null_space(const Matrix& m, double rel);

/// For a Hermitian PSD matrix g returns W = U_r diag(lambda_r^{-1/2}) over the
/// eigenvalues above rel * lambda_max, so that W^H g W = I_r. Empty (k x 0)
/// when g vanishes.
Matrix range_whitener(const Matrix& g, double rel);

struct LeastSquares {
  Vector solution;
  double residual = 0.0;     // ||A x - b||
  double rhs_norm = 0.0;     // ||b||
  int rank = 0;
  int unknowns = 0;
};

/// Minimum-norm least-squares solution via SVD; rank counts singular values
/// above rel_rank * sigma_max.
LeastSquares least_squares(const Matrix& a, const Vector& b, double rel_rank);

/// |x - y| / max(|x|, |y|), with 0 when both are exactly equal.
inline double rel_diff(double x, double y) {
  const double scale = std::max(std::abs(x), std::abs(y));
  if (scale == 0.0) return 0.0;
  return std::abs(x - y) / scale;
}

/// Relative comparison with an absolute floor for values at round-off level.
inline bool close(double x, double y, double rel, double abs_floor = 1e-14) {
  return std::abs(x - y) <= abs_floor || rel_diff(x, y) <= rel;
}

/// Column-major vectorization.
inline Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, Eigen::Index rows) {
  return Eigen::Map<const Matrix>(v.data(), rows, v.size() / rows);
}

} // namespace qstar::linalg
