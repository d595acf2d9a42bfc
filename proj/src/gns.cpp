#include "qstar/gns.hpp"

#include <algorithm>
#include <cmath>

#include "qstar/linalg.hpp"

namespace qstar {

Matrix GnsRep::rep(const Element& a) const {
  Matrix m = Matrix::Zero(dim_h, dim_h);
  for (Eigen::Index i = 0; i < a.coeffs.size(); ++i) {
    if (a.coeffs(i) != cplx(0.0, 0.0)) m += a.coeffs(i) * rep_mats[static_cast<size_t>(i)];
  }
  return m;
}

GnsRep build_gns_from_gram(const QuasiAlgebra& alg, const Matrix& gram, std::string label) {
  const Tolerances& tol = alg.tolerances();
  const int d = alg.dim();
  const auto eig = linalg::hermitian_eigen(gram);
  const double top = eig.values(d - 1);
  if (top <= 0.0) throw Error(ErrorKind::ZeroForm, "form '" + label + "' has zero Gram matrix");

  Eigen::Index first = 0;
  while (first < d && eig.values(first) <= tol.rank * top) ++first;
  const Eigen::Index r = d - first;

  GnsRep rep;
  rep.label = std::move(label);
  rep.dim_h = static_cast<int>(r);
  rep.source_gram = gram;
  rep.onb_coords = eig.values.tail(r).cwiseSqrt().cast<cplx>().asDiagonal() * eig.vectors.rightCols(r).adjoint();

  const Matrix lambda0 = rep.onb_coords * alg.a0_selector(); // columns lambda(x_k)
  Eigen::JacobiSVD<Matrix> svd(lambda0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const int rank0 = s.size() && s(0) > 0.0 ? static_cast<int>((s.array() > std::sqrt(tol.rank) * s(0)).count()) : 0;
  if (rank0 < r) {
    throw Error(ErrorKind::NotIps, "lambda(A0) spans " + std::to_string(rank0) + " of " + std::to_string(r) +
                                       " dimensions of H for form '" + rep.label + "'");
  }
  // lambda0 has full row rank r: lambda0^+ = V S^-1 U^H.
  const Matrix pinv = svd.matrixV() * s.cwiseInverse().cast<cplx>().asDiagonal() * svd.matrixU().adjoint();

  rep.rep_mats.reserve(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    const Matrix images = rep.onb_coords * alg.right_orbit(alg.basis_element(i)); // lambda(B_i x_k)
    Matrix pi = images * pinv;
    const double scale = std::max(images.norm(), std::sqrt(top));
    rep.solve_residual = std::max(rep.solve_residual, (pi * lambda0 - images).norm() / scale);
    rep.rep_mats.push_back(std::move(pi));
  }
  rep.cyclic = rep.lambda(alg.unit());
  return rep;
}

GnsRep build_gns(const QuasiAlgebra& alg, const IpsForm& phi) {
  const FormReport fr = validate_ips_form(alg, phi);
  if (!fr.positive || !fr.invariant) {
    throw Error(ErrorKind::NotIps, "form '" + phi.label + "' is not a positive invariant form");
  }
  if (fr.rank_a == 0) throw Error(ErrorKind::ZeroForm, "form '" + phi.label + "' vanishes");
  if (!fr.dense) {
    throw Error(ErrorKind::NotIps, "lambda(A0) is not dense for form '" + phi.label + "' (" +
                                       std::to_string(fr.rank_a0) + " < " + std::to_string(fr.rank_a) + ")");
  }
  return build_gns_from_gram(alg, gram_matrix(alg, phi), phi.label);
}

double rep_norm(const GnsRep& rep, const Element& a) { return linalg::spectral_norm(rep.rep(a)); }

IpsForm vector_form(const QuasiAlgebra& alg, const GnsRep& rep, const Vector& xi) {
  Matrix v(rep.dim_h, alg.dim());
  for (int j = 0; j < alg.dim(); ++j) v.col(j) = rep.rep_mats[static_cast<size_t>(j)] * xi;
  return IpsForm::gram(v.adjoint() * v, rep.label.empty() ? "vector form" : "vector form of " + rep.label);
}

GnsCheck verify_gns(const QuasiAlgebra& alg, const GnsRep& rep) {
  const Tolerances& tol = alg.tolerances();
  const int d = alg.dim();
  const int d0 = alg.a0_dim();
  GnsCheck c;
  const double gtop = linalg::spectral_norm(rep.source_gram);

  Matrix v(rep.dim_h, d);
  for (int j = 0; j < d; ++j) v.col(j) = rep.rep_mats[static_cast<size_t>(j)] * rep.cyclic;
  c.reconstruction = gtop > 0.0 ? (v.adjoint() * v - rep.source_gram).cwiseAbs().maxCoeff() / gtop : 0.0;

  double pscale = 0.0;
  for (const auto& p : rep.rep_mats) pscale = std::max(pscale, p.norm());
  if (pscale == 0.0) pscale = 1.0;
  for (int i = 0; i < d; ++i) {
    const Matrix lhs = rep.rep(alg.adjoint(alg.basis_element(i)));
    c.star = std::max(c.star, (lhs - rep.rep_mats[static_cast<size_t>(i)].adjoint()).norm() / pscale);
  }
  for (int k = 0; k < d0; ++k) {
    const Matrix pix = rep.rep(alg.a0_element(k));
    for (int j = 0; j < d0; ++j) {
      const Element xy = alg.element(alg.right_mult(k) * alg.a0_element(j).coeffs);
      const Matrix diff = rep.rep(xy) - rep.rep(alg.a0_element(j)) * pix;
      c.homomorphism = std::max(c.homomorphism, diff.norm() / (pscale * pscale));
    }
    for (int i = 0; i < d; ++i) {
      const Element ax = alg.element(alg.right_mult(k) * alg.basis_element(i).coeffs);
      const Matrix diff = rep.rep(ax) - rep.rep_mats[static_cast<size_t>(i)] * pix;
      c.module = std::max(c.module, diff.norm() / (pscale * pscale));
    }
  }
  Matrix orbit(rep.dim_h, d0);
  for (int k = 0; k < d0; ++k) orbit.col(k) = rep.rep(alg.a0_element(k)) * rep.cyclic;
  c.cyclic_rank = linalg::numerical_rank(orbit, std::sqrt(tol.rank));
  c.cyclic = c.cyclic_rank == rep.dim_h;
  c.passed = c.reconstruction <= tol.residual && c.star <= tol.residual && c.homomorphism <= tol.residual &&
             c.module <= tol.residual && c.cyclic;
  c.closure_note = "H_phi is finite-dimensional: lambda_phi(A) is already complete and the closure of pi_phi is pi_phi";
  return c;
}

double regularity_residual(const PreparedFamily& fam, const IpsForm& target_form) {
  const QuasiAlgebra& alg = fam.algebra();
  const int d = alg.dim();
  const int d0 = alg.a0_dim();
  const Matrix target = gram_matrix(alg, target_form);
  const double tnorm = target.norm();
  if (tnorm == 0.0) return 0.0;

  std::vector<Matrix> span;
  for (const auto& g : fam.generator_grams()) {
    for (int j = 0; j < d0; ++j) {
      for (int k = j; k < d0; ++k) {
        const Matrix cross = alg.right_mult(k).adjoint() * g * alg.right_mult(j);
        span.push_back(cross + cross.adjoint());
        if (k != j) span.push_back(I_unit * (cross - cross.adjoint()));
      }
    }
  }
  const Eigen::Index rows = 2 * static_cast<Eigen::Index>(d) * d;
  Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(span.size()));
  auto realify = [&](const Matrix& m) {
    Eigen::VectorXd out(rows);
    const Vector v = linalg::vec(m);
    out.head(v.size()) = v.real();
    out.tail(v.size()) = v.imag();
    return out;
  };
  for (size_t i = 0; i < span.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = realify(span[i]);
  const Eigen::VectorXd b = realify(target);
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  return (a * x - b).norm() / b.norm();
}

} // namespace qstar
