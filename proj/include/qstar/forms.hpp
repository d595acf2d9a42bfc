#pragma once

// Invariant positive sesquilinear forms and finite families of them.
//
// A form is stored either as a vector state, phi(a, b) = tr(b* a S) with a PSD
// weight S in M_n, or as a Gram matrix over the A-basis with the convention
// phi(a, b) = b^H G a, i.e. G(i, j) = phi(B_j, B_i). Every computation
// downstream works on the Gram matrix, which is Hermitian PSD for a positive
// form.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qstar/algebra.hpp"

namespace qstar {

struct VectorState {
  Matrix weight; // S, n x n PSD
};

struct GramForm {
  Matrix gram; // G, d x d PSD
};

struct IpsForm {
  std::variant<VectorState, GramForm> kind;
  std::string label;

  static IpsForm vector_state(Matrix s, std::string label = {}) {
    return IpsForm{VectorState{std::move(s)}, std::move(label)};
  }
  static IpsForm gram(Matrix g, std::string label = {}) { return IpsForm{GramForm{std::move(g)}, std::move(label)}; }

  bool is_vector_state() const { return std::holds_alternative<VectorState>(kind); }
};

/// G with phi(a, b) = b^H G a over the A-basis.
Matrix gram_matrix(const QuasiAlgebra& alg, const IpsForm& phi);

cplx form_eval(const QuasiAlgebra& alg, const IpsForm& phi, const Element& a, const Element& b);

/// Extensional equality: values agree on all basis pairs within tol.
bool forms_equal(const QuasiAlgebra& alg, const IpsForm& phi, const IpsForm& psi, double tol);
bool grams_equal(const Matrix& g, const Matrix& h, double tol);

struct FormReport {
  std::string label;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double positivity_margin = 0.0; // min / max eigenvalue (of S or G)
  double hermitian_residual = 0.0;
  bool positive = false;
  double invariance_residual = 0.0; // max |phi(ax,y) - phi(x,a*y)| / scale
  bool invariant = false;
  int rank_a0 = 0; // dim lambda_phi(A0)
  int rank_a = 0;  // dim lambda_phi(A)
  bool dense = false;
  bool accepted = false;
};

/// Positivity, invariance phi(ax, y) = phi(x, a*y) on basis triples, and
/// density of lambda_phi(A0) in H_phi by comparing Gram ranks. Failures are
/// report entries.
FormReport validate_ips_form(const QuasiAlgebra& alg, const IpsForm& phi);

/// phi^x(a, b) = phi(ax, bx). Vector states twist to x S x*; Gram forms to
/// R_x^H G R_x. Throws NotInA0.
IpsForm twist(const QuasiAlgebra& alg, const IpsForm& phi, const Element& x);

struct FormFamily {
  std::vector<IpsForm> generators;
  bool balanced = true;
  int twist_depth = 1; // words in the A0 basis of length <= depth
  std::string label;
};

/// A member of the effective family: a generator or a twist of one by a word
/// x_{k1}, ..., x_{km} of A0 basis elements applied in that order.
struct FamilyMember {
  int generator = 0;
  std::vector<int> word; // indices into the A0 basis; empty for the generator
  Matrix gram;
  std::string label;
};

/// A family bound to an algebra: generator Grams and the effective family
/// (the depth-limited balanced closure when the family is balanced, the
/// generators otherwise). Twists equal to an earlier member or vanishing
/// identically are dropped.
class PreparedFamily {
public:
  PreparedFamily(const QuasiAlgebra& alg, FormFamily family);

  const FormFamily& family() const { return family_; }
  const QuasiAlgebra& algebra() const { return *alg_; }
  const std::vector<Matrix>& generator_grams() const { return generator_grams_; }
  const std::vector<FamilyMember>& members() const { return members_; }
  /// The member as a Gram-kind form (or the generator itself when word empty).
  IpsForm member_form(size_t i) const;

private:
  const QuasiAlgebra* alg_;
  FormFamily family_;
  std::vector<Matrix> generator_grams_;
  std::vector<FamilyMember> members_;
};

/// Values of the four equivalent vanishing conditions for one element:
/// i) phi(ax, x), ii) phi(ax, y), iii) phi(ax, ax) over generators and A0
/// (i uses polarization pairs so it is exact over all of A0), iv) phi(a, a)
/// over the effective family.
struct VanishingProfile {
  double cond_i = 0.0;
  double cond_ii = 0.0;
  double cond_iii = 0.0;
  double cond_iv = 0.0;
  bool zero_i = false, zero_ii = false, zero_iii = false, zero_iv = false;
  /// i-iii agree, and iv agrees too when the family is balanced.
  bool consistent = false;
};

VanishingProfile vanishing_profile(const PreparedFamily& fam, const Element& a);

struct SufficiencyReport {
  bool sufficient = false;
  bool balanced = false;
  int twist_depth = 1;
  size_t family_size = 0;
  int null_dim = 0;
  std::optional<Element> witness; // unit Frobenius norm
  double witness_max_value = 0.0;  // max over the effective family of phi(a, a)
  double witness_max_generator_value = 0.0;
  std::vector<VanishingProfile> equivalence_samples;
  bool equivalence_holds = true;
};

/// Decides whether the effective family separates A by computing the common
/// null space of its Gram matrices. Throws EmptyFamily.
SufficiencyReport check_sufficiency(const PreparedFamily& fam);
SufficiencyReport check_sufficiency(const QuasiAlgebra& alg, const FormFamily& family);

/// Orthonormal coefficient basis of {a : phi(a, a) = 0 for every member}.
Matrix common_null_space(const std::vector<Matrix>& grams, int dim, double rel_rank);

} // namespace qstar
