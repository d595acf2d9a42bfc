#pragma once

// Order structure and bounded elements of (A, A0) relative to a family M.
//
// All quantities are computed from two matrices per form and element, both in
// A0-coordinates x = sum y_k x_k:
//   Q_a(j, k) = phi(a x_k, x_j)       (cone / order data)
//   D_a(j, k) = phi(a x_k, a x_j)     (strong data)
// and the A0 Gram G0(j, k) = phi(x_k, x_j), restricted to its range.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qstar/gns.hpp"

namespace qstar {

/// A family bound to an algebra with its generators validated, their GNS
/// representations built and per-member whiteners of the A0 Gram cached.
/// Throws NotIps if a generator is not an ips-form, EmptyFamily if there are
/// no generators.
class FamilyContext {
public:
  FamilyContext(const QuasiAlgebra& alg, FormFamily family);

  const QuasiAlgebra& algebra() const { return prepared_.algebra(); }
  const PreparedFamily& prepared() const { return prepared_; }
  const FormFamily& family() const { return prepared_.family(); }
  const std::vector<GnsRep>& reps() const { return reps_; }
  const SufficiencyReport& sufficiency() const { return sufficiency_; }
  /// W with W^H G0 W = I on the range of the member's A0 Gram.
  const Matrix& whitener(size_t member) const { return whiteners_[member]; }

private:
  PreparedFamily prepared_;
  std::vector<GnsRep> reps_;
  std::vector<Matrix> whiteners_;
  SufficiencyReport sufficiency_;
};

/// Q(j, k) = phi(a x_k, x_j) for the form with Gram g.
Matrix cone_matrix(const QuasiAlgebra& alg, const Matrix& gram, const Element& a);

struct ConeWitness {
  int generator = 0;
  Vector x_coords; // A0 coordinates, largest entry scaled to 1
  Element x;
  cplx value;      // phi(ax, x)
  bool hermitian_failure = false; // value has a non-real part
};

struct ConeReport {
  bool member = false;
  std::vector<double> min_eigenvalues; // per generator, Hermitian part of Q
  std::vector<double> margins;         // min eigenvalue / max |eigenvalue|
  std::vector<double> hermitian_residuals;
  std::optional<ConeWitness> witness;
};

/// a in K_M iff every generator's Q_a is Hermitian PSD within tolerance.
/// Throws FamilyNotBalanced.
ConeReport cone_membership(const FamilyContext& ctx, const Element& a);

/// Orthonormal coefficient basis of K_M cap (-K_M) = {a : Q_a = 0 for all generators}.
Matrix cone_lineality(const FamilyContext& ctx);

struct BoundednessReport {
  bool bounded = false;
  double norm = 0.0;          // ||a||_b^M
  double norm_forms = 0.0;    // sup |phi(ax,y)| over normalized x, y and the effective family
  double norm_reps = 0.0;     // sup ||pi_phi(a)|| over generator GNS representations  (ii)
  double gamma = 0.0;         // gamma_a, equal to norm_forms
  double gamma_prime = 0.0;   // smallest gamma' with phi(ax,ax) <= gamma' phi(x,x)   (iii)
  double gamma_second = 0.0;  // smallest gamma'' with |phi(ax,x)| <= gamma'' phi(x,x)
  double gamma_re = 0.0;      // +-phi(Re(a)x,x) <= gamma_re phi(x,x)
  double gamma_im = 0.0;      // +-phi(Im(a)x,x) <= gamma_im phi(x,x)
  double norm_order = 0.0;    // order route: Hermitian dilation of the Re/Im cone data (iv)
  std::array<bool, 4> verdicts{}; // characterizations i)-iv)
  double max_route_disagreement = 0.0;
  bool chain_ok = false;      // max(gamma_re, gamma_im) <= gamma'' <= sqrt(gamma') <= 2 gamma''
  double null_leak = 0.0;     // relative mass of D_a on the null space of G0
  std::vector<double> member_norms; // per effective-family member
};

/// Computes ||a||_b^M independently through the form supremum, the GNS
/// operator norms, the strong inequality (iii) and the order route (iv), and
/// cross-checks them. Throws NotSufficient, or CharacterizationMismatch when
/// the routes disagree beyond the cross-check tolerance.
BoundednessReport m_bounded_norm(const FamilyContext& ctx, const Element& a);

/// Largest eigenvalue of Re(e^{i theta} T) maximized over theta.
double numerical_radius(const Matrix& t);

struct WeakProductResult {
  Element product;
  double relative_residual = 0.0;
  int rank = 0;
  int unknowns = 0;
};

/// Least-squares solve of phi(c x, y) = phi(b x, a* y) over generators and
/// A0 basis pairs, without acceptance decisions.
WeakProductResult solve_weak_product(const FamilyContext& ctx, const Element& a, const Element& b);

/// a o b. Throws AmbiguousProduct (system rank deficient) or NotWellDefined
/// (residual above the weak tolerance).
Element weak_product(const FamilyContext& ctx, const Element& a, const Element& b);

/// Non-throwing variant; empty when the product does not resolve.
std::optional<Element> try_weak_product(const FamilyContext& ctx, const Element& a, const Element& b);

struct ConditionCFailure {
  size_t first = 0, second = 0; // probe indices
  double residual = 0.0;
  bool unique = true;
};

struct ConditionCReport {
  size_t pairs_checked = 0;
  std::vector<ConditionCFailure> failures;
  double max_residual = 0.0;
  bool passed = false;
  std::string quantifier;
};

/// For each probe pair (a, b) solves pi_phi(c) = pi_phi(a) pi_phi(b)
/// simultaneously over the generators' GNS representations.
ConditionCReport check_condition_C(const FamilyContext& ctx, const std::vector<Element>& probes);

/// Solves for c with pi_phi(c) = pi_phi(a) pi_phi(b) for all generators.
WeakProductResult solve_rep_product(const FamilyContext& ctx, const Element& a, const Element& b);

struct RadicalReport {
  Matrix basis;            // coefficient columns of {a : phi(a,a) = 0, phi in effective family}
  int dim = 0;
  Matrix operator_kernel;  // intersection of ker pi_phi over generators
  int operator_kernel_dim = 0;
  Matrix cyclic_kernel;    // intersection of {a : pi_phi(a) xi_phi = 0} over generators
  int cyclic_kernel_dim = 0;
  bool matches = false;    // against operator kernels (balanced) or cyclic kernels (unbalanced)
  std::string comparison;
};

RadicalReport radical(const FamilyContext& ctx);

/// True when two coefficient subspaces (orthonormal columns) coincide.
bool same_subspace(const Matrix& u, const Matrix& v, double tol);

struct CstarSample {
  size_t probe = 0;
  double norm_sq = 0.0;      // ||a||^2
  double product_norm = 0.0; // ||a* o a||
  double rel_error = 0.0;
};

struct BoundedAlgebraReport {
  std::vector<double> basis_norms;
  bool all_bounded = false;
  double max_adjoint_defect = 0.0;      // | ||a*|| - ||a|| | / ||a||
  double max_triangle_excess = 0.0;     // (||a+b|| - ||a|| - ||b||)_+ / scale
  double max_submult_excess = 0.0;      // (||a o b|| - ||a|| ||b||)_+ / scale
  size_t products_resolved = 0;
  std::vector<CstarSample> cstar;
  double max_cstar_error = 0.0;
  bool normed_star_algebra = false;
  bool cstar_identity = false;
  std::string completeness_note;
};

/// Norms of the basis elements and the normed / C* laws of the bounded part
/// on probes. Throws NotSufficient.
BoundedAlgebraReport extract_bounded_algebra(const FamilyContext& ctx, const std::vector<Element>& probes);

} // namespace qstar
