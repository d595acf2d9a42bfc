#pragma once

// Seminorm families on A and the well-behavedness harness.
//
// A bounded form set F is a finite set of forms stored by Gram matrix. The
// seminorms are
//   p^F(a)   = max_F phi(a,a)^{1/2}
//   p_F(a)   = max_F |phi(a,e)|
//   p^F_*(a) = max(p^F(a), p^F(a*))
// and for a single phi and x, y in A0
//   tau_w:  |phi(ax, y)|,  tau_s: phi(ax,ax)^{1/2},
//   tau_s*: max(phi(ax,ax)^{1/2}, phi(a*x,a*x)^{1/2}).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qstar/bounded.hpp"

namespace qstar {

struct BoundedFormSet {
  std::vector<Matrix> grams;
  std::vector<std::string> labels;
  double bound_certificate = 0.0; // max over F and the A-basis of phi(B_i, B_i)
};

/// Validates positivity and invariance of every form. Throws NotIps.
BoundedFormSet make_bounded_set(const QuasiAlgebra& alg, const std::vector<IpsForm>& forms);
/// The effective family (balanced closure or generators) as a bounded set.
BoundedFormSet bounded_set_from_family(const PreparedFamily& fam);

enum class SeminormKind { PUpper, PLower, PStar, TauW, TauS, TauSStar };

std::string to_string(SeminormKind k);

struct SeminormParams {
  const BoundedFormSet* set = nullptr; // p^F, p_F, p^F_*
  Matrix gram;                         // tau_w, tau_s, tau_s*
  std::optional<Element> x, y;         // default: the unit
};

struct SeminormValue {
  SeminormKind kind;
  double value = 0.0;
};

/// Throws InvalidArgument when the parameters for the kind are missing and
/// NotInA0 when x or y is outside A0.
SeminormValue seminorm_eval(const QuasiAlgebra& alg, SeminormKind kind, const SeminormParams& params,
                            const Element& a);

double p_upper(const BoundedFormSet& f, const Element& a);
double p_lower(const QuasiAlgebra& alg, const BoundedFormSet& f, const Element& a);
double p_star(const QuasiAlgebra& alg, const BoundedFormSet& f, const Element& a);
/// gamma_F = max_F phi(e,e)^{1/2}.
double gamma_F(const QuasiAlgebra& alg, const BoundedFormSet& f);

/// F^x = {phi^x : phi in F}. Throws NotInA0.
BoundedFormSet twisted_family(const QuasiAlgebra& alg, const BoundedFormSet& f, const Element& x);

/// Smallest gamma_x with phi(xa, xa) <= gamma_x phi(a, a) for all a and every
/// generator. +inf when some generator has phi(xa, xa) > 0 = phi(a, a).
/// Throws NotInA0.
double left_mult_bound(const QuasiAlgebra& alg, const Element& x, const std::vector<Matrix>& generator_grams);

struct NamedSeminorm {
  std::string name;
  std::function<double(const Element&)> eval;
};

struct DominanceEntry {
  std::string name;
  double gamma = 0.0;     // smallest gamma with p(a) <= gamma max_Q q(a) on the probes
  std::optional<size_t> witness; // probe attaining gamma
  size_t degenerate = 0;  // probes with p(a) > 0 = max_Q q(a)
};

struct ComparisonReport {
  std::vector<DominanceEntry> entries;
  std::string note;
};

ComparisonReport compare_topologies(const std::vector<NamedSeminorm>& p, const std::vector<NamedSeminorm>& q,
                                    const std::vector<Element>& probes);

struct SeminormLawReport {
  size_t probes = 0;
  double gamma_F = 0.0;
  double max_homogeneity_defect = 0.0; // |p(t a) - |t| p(a)| / scale over p^F, p_F, p^F_*
  double max_triangle_excess = 0.0;    // (p(a+b) - p(a) - p(b))_+ / scale
  double max_ordering_excess = 0.0;    // p_F <= gamma_F p^F <= gamma_F p^F_*
  double max_lower_adjoint_defect = 0.0; // |p_F(a*) - p_F(a)| / scale
  double max_twist_defect = 0.0;       // |p^F(ax) - p^{F^x}(a)| / scale over A0 basis x
  size_t cstar_samples = 0;
  double max_cstar_defect = 0.0;       // |p_F(a* o a) - p^F(a)^2| / p^F(a)^2
  bool radical_coherent = false;
  std::vector<double> left_mult_bounds; // gamma_x per A0 basis element
  ComparisonReport comparison;          // {p_F, p^F, p^F_*} against {p^F}
  bool passed = false;
};

/// Seminorm laws on the probes with F the effective family.
SeminormLawReport seminorm_laws(const FamilyContext& ctx, const std::vector<Element>& probes);

struct HarnessCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  double value = 0.0;
};

struct GAStarReport {
  std::vector<HarnessCheck> checks; // wb1-wb4, then consequences (a)-(c)
  std::optional<Element> witness;   // wb1 failure witness
  std::optional<std::string> error; // EmptyFamily / NotIps etc.
  bool all_passed = false;
  std::string wb4_note;
};

GAStarReport ga_star_check(const QuasiAlgebra& alg, const FormFamily& family, const std::vector<Element>& probes);

/// The fixed wb4 note.
const std::string& wb4_structural_note();

} // namespace qstar
