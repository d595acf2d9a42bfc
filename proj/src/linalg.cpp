#include "qstar/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace qstar::linalg {

HermitianEigen hermitian_eigen(const Matrix& m) {
  if (m.size() == 0) return {RealVector(0), Matrix(0, 0)};
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

int numerical_rank(const Matrix& m, double rel) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const RealVector& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > rel * s(0)).count());
}

Matrix null_space(const Matrix& m, double rel) {
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0 || m.norm() == 0.0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rel * s(0)) ++r;
  return svd.matrixV().rightCols(cols - r);
}

Matrix range_whitener(const Matrix& g, double rel) {
  const auto eig = hermitian_eigen(g);
  const Eigen::Index k = g.rows();
  if (k == 0) return Matrix(0, 0);
  const double top = eig.values(k - 1);
  if (top <= 0.0) return Matrix(k, 0);
  Eigen::Index first = 0;
  while (first < k && eig.values(first) <= rel * top) ++first;
  Matrix w = eig.vectors.rightCols(k - first);
  for (Eigen::Index j = 0; j < w.cols(); ++j) w.col(j) /= std::sqrt(eig.values(first + j));
  return w;
}

LeastSquares least_squares(const Matrix& a, const Vector& b, double rel_rank) {
  LeastSquares out;
  out.unknowns = static_cast<int>(a.cols());
  out.rhs_norm = b.norm();
  if (a.rows() == 0 || a.cols() == 0) {
    out.solution = Vector::Zero(a.cols());
    out.residual = out.rhs_norm;
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  if (s(0) == 0.0) {
    out.solution = Vector::Zero(a.cols());
  } else {
    svd.setThreshold(rel_rank);
    out.rank = static_cast<int>(svd.rank());
    out.solution = svd.solve(b);
  }
  out.residual = (a * out.solution - b).norm();
  return out;
}

} // namespace qstar::linalg
