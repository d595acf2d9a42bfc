#pragma once

// Finite-dimensional quasi *-algebras (A, A0) realized inside M_n(C).
//
// A is the span of a list of linearly independent n x n matrices; A0 is the
// span of a subset of that list and must contain the identity. Elements are
// carried as coefficient vectors over the A-basis together with the realized
// matrix. Module products and the involution act linearly on coefficients, so
// the algebra precomputes their coefficient matrices once.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qstar/core.hpp"

namespace qstar {

/// Raw, unvalidated instance as read from disk.
struct QuasiAlgebraInstance {
  int n = 0;
  std::vector<Matrix> a_basis;
  std::vector<int> a0_indices;
  int unit_index = 0;
  std::string label;
};

struct Element {
  Vector coeffs; // over the A-basis
  Matrix matrix; // sum_i coeffs[i] * basis[i]

  Element& operator+=(const Element& o) {
    coeffs += o.coeffs;
    matrix += o.matrix;
    return *this;
  }
  Element& operator-=(const Element& o) {
    coeffs -= o.coeffs;
    matrix -= o.matrix;
    return *this;
  }
  Element& operator*=(cplx s) {
    coeffs *= s;
    matrix *= s;
    return *this;
  }
};

inline Element operator+(Element a, const Element& b) { return a += b; }
inline Element operator-(Element a, const Element& b) { return a -= b; }
inline Element operator*(cplx s, Element a) { return a *= s; }
inline Element operator*(double s, Element a) { return a *= cplx(s, 0.0); }

/// One axiom of the structure validation with its worst residual.
struct AxiomCheck {
  std::string name;
  double max_residual = 0.0;
  bool passed = true;
  std::optional<std::pair<int, int>> worst_pair; // basis indices
};

struct StructureViolation {
  ErrorKind kind;
  std::string axiom;
  std::optional<std::pair<int, int>> pair;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<AxiomCheck> axioms;
  bool usable = false;
  std::optional<StructureViolation> violation; // first failing axiom
};

/// Checks the quasi *-algebra axioms on basis elements: unit, independence,
/// A0 closed under products and adjoints, A closed under adjoint and
/// two-sided A0 multiplication, both associative laws and (ax)* = x*a*.
/// Pure; never throws for mathematical failures.
ValidationReport validate_structure(const QuasiAlgebraInstance& instance,
                                    const Tolerances& tol = {});

/// Validated instance with precomputed coefficient maps. Immutable.
class QuasiAlgebra {
public:
  /// Throws Error (MissingUnit, DependentBasis, ClosureViolation) when the
  /// instance fails validation.
  explicit QuasiAlgebra(QuasiAlgebraInstance instance, const Tolerances& tol = {});

  int n() const { return instance_.n; }
  int dim() const { return static_cast<int>(instance_.a_basis.size()); }
  int a0_dim() const { return static_cast<int>(instance_.a0_indices.size()); }
  const QuasiAlgebraInstance& instance() const { return instance_; }
  const ValidationReport& validation() const { return report_; }
  const Tolerances& tolerances() const { return tol_; }
  const std::string& label() const { return instance_.label; }

  const Matrix& basis_matrix(int i) const { return instance_.a_basis[static_cast<size_t>(i)]; }
  const std::vector<int>& a0_indices() const { return instance_.a0_indices; }

  Element element(const Vector& coeffs) const;
  Element basis_element(int i) const;
  /// k-th A0 basis element (k indexes a0_indices).
  Element a0_element(int k) const;
  Element unit() const { return basis_element(instance_.unit_index); }
  Element zero() const;

  /// Coefficients of m over the A-basis and the relative residual
  /// ||m - sum c_i B_i||_F / ||m||_F (0 for m = 0).
  std::pair<Vector, double> project(const Matrix& m) const;
  /// Throws ClosureViolation when m is not in span(A).
  Element from_matrix(const Matrix& m) const;

  bool in_a0(const Element& x) const;
  /// A0 coordinates (length a0_dim) of an element of A0 and the relative
  /// size of its component outside A0.
  std::pair<Vector, double> a0_coordinates(const Element& x) const;
  /// Embeds A0 coordinates into A coefficients.
  Element from_a0_coordinates(const Vector& y) const;

  Element adjoint(const Element& a) const;

  /// Coefficient matrix of a -> a * x_k (x_k the k-th A0 basis element).
  const Matrix& right_mult(int k) const { return right_[static_cast<size_t>(k)]; }
  /// Coefficient matrix of a -> x_k * a.
  const Matrix& left_mult(int k) const { return left_[static_cast<size_t>(k)]; }
  /// Coefficient matrix of a -> a * x for x in A0 (linear in x's coordinates).
  Matrix right_mult_by(const Element& x) const;
  Matrix left_mult_by(const Element& x) const;
  /// d x d0 matrix whose k-th column holds the coefficients of a * x_k.
  Matrix right_orbit(const Element& a) const;
  /// d x d0 selector of the A0 basis inside the A coefficients.
  const Matrix& a0_selector() const { return selector_; }

private:
  QuasiAlgebraInstance instance_;
  Tolerances tol_;
  ValidationReport report_;
  Matrix vectorized_; // n^2 x d
  Eigen::ColPivHouseholderQR<Matrix> qr_;
  Matrix adjoint_map_; // column i: coefficients of B_i^*
  std::vector<Matrix> right_;
  std::vector<Matrix> left_;
  Matrix selector_;
};

/// Re(a) = (a + a*)/2 and Im(a) = (a - a*)/(2i).
std::pair<Element, Element> hermitian_parts(const QuasiAlgebra& alg, const Element& a);

enum class Side { Left, Right };

/// x a (Left) or a x (Right) for x in A0. Throws NotInA0 or ClosureViolation.
Element module_product(const QuasiAlgebra& alg, const Element& x, const Element& a, Side side);

/// Convenience constructors for matrix-unit style instances.
Matrix matrix_unit(int n, int i, int j);

} // namespace qstar
