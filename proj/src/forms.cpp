#include "qstar/forms.hpp"

#include <algorithm>
#include <cmath>

#include "qstar/linalg.hpp"
#include "qstar/probes.hpp"

namespace qstar {

Matrix gram_matrix(const QuasiAlgebra& alg, const IpsForm& phi) {
  const int d = alg.dim();
  const int n = alg.n();
  if (const auto* vs = std::get_if<VectorState>(&phi.kind)) {
    if (vs->weight.rows() != n || vs->weight.cols() != n)
      throw Error(ErrorKind::InvalidArgument, "vector-state weight has wrong shape");
    Matrix basis(static_cast<Eigen::Index>(n) * n, d), weighted(static_cast<Eigen::Index>(n) * n, d);
    for (int j = 0; j < d; ++j) {
      basis.col(j) = linalg::vec(alg.basis_matrix(j));
      weighted.col(j) = linalg::vec(alg.basis_matrix(j) * vs->weight);
    }
    // G(i, j) = tr(B_i^* B_j S)
    return basis.adjoint() * weighted;
  }
  const auto& g = std::get<GramForm>(phi.kind).gram;
  if (g.rows() != d || g.cols() != d) throw Error(ErrorKind::InvalidArgument, "Gram matrix has wrong shape");
  return g;
}

cplx form_eval(const QuasiAlgebra& alg, const IpsForm& phi, const Element& a, const Element& b) {
  if (const auto* vs = std::get_if<VectorState>(&phi.kind)) {
    return (b.matrix.adjoint() * a.matrix * vs->weight).trace();
  }
  return b.coeffs.dot(gram_matrix(alg, phi) * a.coeffs); // dot conjugates its left side
}

bool grams_equal(const Matrix& g, const Matrix& h, double tol) {
  const double scale = std::max(g.cwiseAbs().maxCoeff(), h.cwiseAbs().maxCoeff());
  if (scale == 0.0) return true;
  return (g - h).cwiseAbs().maxCoeff() <= tol * scale;
}

bool forms_equal(const QuasiAlgebra& alg, const IpsForm& phi, const IpsForm& psi, double tol) {
  return grams_equal(gram_matrix(alg, phi), gram_matrix(alg, psi), tol);
}

FormReport validate_ips_form(const QuasiAlgebra& alg, const IpsForm& phi) {
  const Tolerances& tol = alg.tolerances();
  FormReport rep;
  rep.label = phi.label;

  const Matrix carrier = phi.is_vector_state() ? std::get<VectorState>(phi.kind).weight : gram_matrix(alg, phi);
  const double cnorm = carrier.norm();
  rep.hermitian_residual = cnorm == 0.0 ? 0.0 : (carrier - carrier.adjoint()).norm() / cnorm;
  const auto eig = linalg::hermitian_eigen(carrier);
  rep.min_eigenvalue = eig.values(0);
  rep.max_eigenvalue = eig.values(eig.values.size() - 1);
  const double top = std::max(rep.max_eigenvalue, 0.0);
  rep.positivity_margin = top > 0.0 ? rep.min_eigenvalue / top : (rep.min_eigenvalue < 0.0 ? -1.0 : 0.0);
  rep.positive = rep.hermitian_residual <= tol.residual && rep.min_eigenvalue >= -tol.psd * top;

  const Matrix g = gram_matrix(alg, phi);
  const Matrix& sel = alg.a0_selector();
  const double gnorm = linalg::spectral_norm(g);
  double worst = 0.0;
  for (int i = 0; i < alg.dim(); ++i) {
    const Element a = alg.basis_element(i);
    const Matrix lhs = sel.adjoint() * g * alg.right_orbit(a);               // [j,k] = phi(a x_k, x_j)
    const Matrix rhs = alg.right_orbit(alg.adjoint(a)).adjoint() * g * sel; // [j,k] = phi(x_k, a* x_j)
    const double scale = std::max({lhs.norm(), rhs.norm(), gnorm});
    if (scale > 0.0) worst = std::max(worst, (lhs - rhs).norm() / scale);
  }
  rep.invariance_residual = worst;
  rep.invariant = worst <= tol.residual;

  // Ranks of the Gram matrices of lambda(A) and lambda(A0) on a common scale.
  const auto geig = linalg::hermitian_eigen(g);
  const double gtop = geig.values(geig.values.size() - 1);
  if (gtop > 0.0) {
    rep.rank_a = static_cast<int>((geig.values.array() > tol.rank * gtop).count());
    const auto g0eig = linalg::hermitian_eigen(sel.adjoint() * g * sel);
    rep.rank_a0 = static_cast<int>((g0eig.values.array() > tol.rank * gtop).count());
  }
  rep.dense = rep.rank_a0 == rep.rank_a;
  rep.accepted = rep.positive && rep.invariant && rep.dense;
  return rep;
}

IpsForm twist(const QuasiAlgebra& alg, const IpsForm& phi, const Element& x) {
  if (!alg.in_a0(x)) throw Error(ErrorKind::NotInA0, "twisting element is not in A0");
  const std::string label = phi.label.empty() ? std::string("twist") : phi.label + "^x";
  if (const auto* vs = std::get_if<VectorState>(&phi.kind)) {
    return IpsForm::vector_state(x.matrix * vs->weight * x.matrix.adjoint(), label);
  }
  const Matrix r = alg.right_mult_by(x);
  return IpsForm::gram(r.adjoint() * std::get<GramForm>(phi.kind).gram * r, label);
}

PreparedFamily::PreparedFamily(const QuasiAlgebra& alg, FormFamily family) : alg_(&alg), family_(std::move(family)) {
  const double tol = alg.tolerances().residual;
  int unit_k = -1;
  for (int k = 0; k < alg.a0_dim(); ++k)
    if (alg.a0_indices()[static_cast<size_t>(k)] == alg.instance().unit_index) unit_k = k;

  for (size_t gi = 0; gi < family_.generators.size(); ++gi) {
    const auto& gen = family_.generators[gi];
    Matrix g = gram_matrix(alg, gen);
    generator_grams_.push_back(g);
    const std::string base = gen.label.empty() ? "phi" + std::to_string(gi) : gen.label;
    members_.push_back(FamilyMember{static_cast<int>(gi), {}, g, base});
  }
  if (!family_.balanced) return;

  const size_t ngen = members_.size();
  // Breadth-first over words; level holds members created at the previous depth.
  std::vector<size_t> level(ngen);
  for (size_t i = 0; i < ngen; ++i) level[i] = i;
  for (int depth = 1; depth <= family_.twist_depth; ++depth) {
    std::vector<size_t> next;
    for (size_t idx : level) {
      for (int k = 0; k < alg.a0_dim(); ++k) {
        if (k == unit_k) continue;
        const FamilyMember& parent = members_[idx];
        const Matrix& r = alg.right_mult(k);
        Matrix g = r.adjoint() * parent.gram * r;
        const double gmax = g.cwiseAbs().maxCoeff();
        const double pmax = generator_grams_[static_cast<size_t>(parent.generator)].cwiseAbs().maxCoeff();
        if (gmax <= 1e-14 * pmax) continue;
        bool duplicate = false;
        for (const auto& m : members_) {
          if (grams_equal(m.gram, g, tol)) {
            duplicate = true;
            break;
          }
        }
        if (duplicate) continue;
        FamilyMember child{parent.generator, parent.word, std::move(g), {}};
        child.word.push_back(k);
        child.label = members_[static_cast<size_t>(parent.generator)].label + "^x" + std::to_string(k);
        for (size_t w = 1; w < child.word.size(); ++w) child.label += ",x" + std::to_string(child.word[w]);
        members_.push_back(std::move(child));
        next.push_back(members_.size() - 1);
      }
    }
    level = std::move(next);
  }
}

IpsForm PreparedFamily::member_form(size_t i) const {
  const auto& m = members_[i];
  if (m.word.empty()) return family_.generators[static_cast<size_t>(m.generator)];
  return IpsForm::gram(m.gram, m.label);
}

Matrix common_null_space(const std::vector<Matrix>& grams, int dim, double rel_rank) {
  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& g : grams) {
    const double top = linalg::spectral_norm(g);
    if (top > 0.0) sum += g / top;
  }
  const auto eig = linalg::hermitian_eigen(sum);
  const double top = eig.values.size() ? eig.values(eig.values.size() - 1) : 0.0;
  Eigen::Index count = 0;
  while (count < eig.values.size() && eig.values(count) <= rel_rank * top) ++count;
  return eig.vectors.leftCols(count);
}

VanishingProfile vanishing_profile(const PreparedFamily& fam, const Element& a) {
  const QuasiAlgebra& alg = fam.algebra();
  const double rel = alg.tolerances().rank;
  const Matrix& sel = alg.a0_selector();
  const Matrix t = alg.right_orbit(a);
  const int d0 = alg.a0_dim();

  VanishingProfile p;
  double gmax = 0.0, rmax = 0.0;
  for (const auto& g : fam.generator_grams()) {
    gmax = std::max(gmax, linalg::spectral_norm(g));
    const Matrix q = sel.adjoint() * g * t; // q(j,k) = phi(a x_k, x_j)
    p.cond_ii = std::max(p.cond_ii, q.cwiseAbs().maxCoeff());
    // Diagonal values on x_j, x_j + x_k and x_j + i x_k determine q entirely.
    for (int j = 0; j < d0; ++j) {
      p.cond_i = std::max(p.cond_i, std::abs(q(j, j)));
      for (int k = j + 1; k < d0; ++k) {
        for (cplx w : {cplx(1.0, 0.0), I_unit}) {
          const cplx v = q(j, j) + std::norm(w) * q(k, k) + std::conj(w) * q(j, k) + w * q(k, j);
          p.cond_i = std::max(p.cond_i, std::abs(v));
        }
      }
    }
    const Matrix dq = t.adjoint() * g * t; // diag: phi(a x_k, a x_k)
    for (int k = 0; k < d0; ++k) p.cond_iii = std::max(p.cond_iii, dq(k, k).real());
  }
  double mmax = 0.0;
  for (const auto& m : fam.members()) {
    mmax = std::max(mmax, linalg::spectral_norm(m.gram));
    p.cond_iv = std::max(p.cond_iv, a.coeffs.dot(m.gram * a.coeffs).real());
  }
  for (int k = 0; k < d0; ++k) rmax = std::max(rmax, linalg::spectral_norm(alg.right_mult(k)));
  const double an = a.coeffs.norm();
  // Quadratic quantities use the rank threshold, linear ones its square root,
  // matching Cauchy-Schwarz between the two.
  const double lin = std::sqrt(rel) * gmax * rmax * rmax * an;
  p.zero_i = p.cond_i <= lin;
  p.zero_ii = p.cond_ii <= lin;
  p.zero_iii = p.cond_iii <= rel * gmax * rmax * rmax * an * an;
  p.zero_iv = p.cond_iv <= rel * mmax * an * an;
  p.consistent = p.zero_i == p.zero_ii && p.zero_ii == p.zero_iii;
  if (fam.family().balanced) p.consistent = p.consistent && p.zero_iii == p.zero_iv;
  return p;
}

SufficiencyReport check_sufficiency(const PreparedFamily& fam) {
  const QuasiAlgebra& alg = fam.algebra();
  if (fam.family().generators.empty()) throw Error(ErrorKind::EmptyFamily, "family has no generators");
  SufficiencyReport rep;
  rep.balanced = fam.family().balanced;
  rep.twist_depth = fam.family().twist_depth;
  rep.family_size = fam.members().size();

  std::vector<Matrix> grams;
  for (const auto& m : fam.members()) grams.push_back(m.gram);
  const Matrix null = common_null_space(grams, alg.dim(), alg.tolerances().rank);
  rep.null_dim = static_cast<int>(null.cols());
  rep.sufficient = rep.null_dim == 0;

  std::vector<Element> samples;
  if (!rep.sufficient) {
    Element w = alg.element(null.col(0));
    w *= cplx(1.0 / w.matrix.norm(), 0.0);
    for (const auto& m : fam.members())
      rep.witness_max_value = std::max(rep.witness_max_value, w.coeffs.dot(m.gram * w.coeffs).real());
    for (const auto& g : fam.generator_grams())
      rep.witness_max_generator_value = std::max(rep.witness_max_generator_value, w.coeffs.dot(g * w.coeffs).real());
    rep.witness = w;
    samples.push_back(w);
  }
  for (int i = 0; i < alg.dim(); ++i) samples.push_back(alg.basis_element(i));
  for (auto& e : random_elements(alg, 4, kDefaultSeed)) samples.push_back(std::move(e));
  for (const auto& s : samples) {
    rep.equivalence_samples.push_back(vanishing_profile(fam, s));
    rep.equivalence_holds = rep.equivalence_holds && rep.equivalence_samples.back().consistent;
  }
  return rep;
}

SufficiencyReport check_sufficiency(const QuasiAlgebra& alg, const FormFamily& family) {
  return check_sufficiency(PreparedFamily(alg, family));
}

} // namespace qstar
