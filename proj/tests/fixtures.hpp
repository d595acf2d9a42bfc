#pragma once

// Small instances shared by the unit tests and the acceptance driver.

#include <algorithm>
#include <random>
#include <string>

#include "qstar/io.hpp"

namespace qstar::fixtures {

inline Matrix eye(int n) { return Matrix::Identity(n, n); }

/// A = M_n with basis {I, E_ij for (i, j) != (0, 0)}; A0 = A.
inline QuasiAlgebraInstance full_matrix(int n) {
  QuasiAlgebraInstance inst;
  inst.n = n;
  inst.label = "M" + std::to_string(n);
  inst.a_basis.push_back(eye(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != 0 || j != 0) inst.a_basis.push_back(matrix_unit(n, i, j));
  for (int i = 0; i < n * n; ++i) inst.a0_indices.push_back(i);
  return inst;
}

/// A = A0 = diagonal matrices, basis {I, E_11, ..., E_{n-1,n-1}} (zero based).
inline QuasiAlgebraInstance diagonal(int n) {
  QuasiAlgebraInstance inst;
  inst.n = n;
  inst.label = "diag" + std::to_string(n);
  inst.a_basis.push_back(eye(n));
  for (int i = 1; i < n; ++i) inst.a_basis.push_back(matrix_unit(n, i, i));
  for (int i = 0; i < n; ++i) inst.a0_indices.push_back(i);
  return inst;
}

/// A = M_n, A0 = diagonal matrices. The first n basis entries span A0.
inline QuasiAlgebraInstance full_over_diagonal(int n) {
  QuasiAlgebraInstance inst = diagonal(n);
  inst.label = "M" + std::to_string(n) + "/diag";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) inst.a_basis.push_back(matrix_unit(n, i, j));
  return inst;
}

/// A = block-diagonal M_b1 + M_b2 inside M_n, A0 = diagonal matrices.
inline QuasiAlgebraInstance blocks_over_diagonal(int b1, int b2) {
  const int n = b1 + b2;
  QuasiAlgebraInstance inst = diagonal(n);
  inst.label = "blocks" + std::to_string(b1) + "+" + std::to_string(b2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool same = (i < b1) == (j < b1);
      if (i != j && same) inst.a_basis.push_back(matrix_unit(n, i, j));
    }
  return inst;
}

/// Replaces the non-unit basis by an invertible real mixing of it.
inline QuasiAlgebraInstance mixed(QuasiAlgebraInstance inst, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const int d = static_cast<int>(inst.a_basis.size());
  // Mix only within A0 and within the complement so that a0_indices stays valid.
  auto mix = [&](const std::vector<int>& idx) {
    const int m = static_cast<int>(idx.size());
    if (m == 0) return;
    Eigen::MatrixXd t;
    for (;;) { // keep the mixing well conditioned
      t = Eigen::MatrixXd::Identity(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) t(i, j) += 0.3 * g(rng);
      const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(t).singularValues();
      if (sv(m - 1) > 0.0 && sv(0) / sv(m - 1) <= 10.0) break;
    }
    std::vector<Matrix> out;
    for (int i = 0; i < m; ++i) {
      Matrix acc = Matrix::Zero(inst.n, inst.n);
      for (int j = 0; j < m; ++j) acc += t(i, j) * inst.a_basis[static_cast<size_t>(idx[static_cast<size_t>(j)])];
      out.push_back(acc);
    }
    for (int i = 0; i < m; ++i) inst.a_basis[static_cast<size_t>(idx[static_cast<size_t>(i)])] = out[static_cast<size_t>(i)];
  };
  std::vector<int> a0_rest, other;
  for (int i = 0; i < d; ++i) {
    const bool in_a0 = std::find(inst.a0_indices.begin(), inst.a0_indices.end(), i) != inst.a0_indices.end();
    if (i == inst.unit_index) continue;
    (in_a0 ? a0_rest : other).push_back(i);
  }
  mix(a0_rest);
  mix(other);
  inst.label += "~mixed";
  return inst;
}

/// Bundled m2_diag instance: basis {I, E11, E12, E21} (one based), A0 = span{I, E11}.
inline QuasiAlgebraInstance m2_diag() {
  QuasiAlgebraInstance inst;
  inst.n = 2;
  inst.label = "m2_diag";
  inst.a_basis = {eye(2), matrix_unit(2, 0, 0), matrix_unit(2, 0, 1), matrix_unit(2, 1, 0)};
  inst.a0_indices = {0, 1};
  return inst;
}

inline Matrix sigma_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

inline Matrix diag_matrix(std::initializer_list<cplx> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (cplx v : d) m(i, i) = v, ++i;
  return m;
}

inline Matrix random_psd(int n, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix b(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) b(i, j) = cplx(g(rng), g(rng));
  return b * b.adjoint();
}

/// Complex vector with every entry of modulus in [0.5, 1.5].
inline Vector full_support_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.5, 1.5), ph(0.0, 6.283185307179586);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = std::polar(r(rng), ph(rng));
  return v;
}

#ifdef QSTAR_DATA_DIR
inline std::string data_path(const std::string& name) { return std::string(QSTAR_DATA_DIR) + "/" + name; }

inline QuasiAlgebraInstance bundled_instance(const std::string& name) {
  return io::parse_instance(io::read_json_file(data_path(name + ".instance.json")));
}

inline FormFamily bundled_family(const QuasiAlgebra& alg, const std::string& file) {
  return io::parse_family(io::read_json_file(data_path(file)), alg.n(), alg.dim());
}
#endif

} // namespace qstar::fixtures
