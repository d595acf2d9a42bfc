#pragma once

// GNS representations of ips-forms on the finite quotient A / N_phi.
//
// The Gram matrix G of phi is diagonalized, eigenvalues below the rank
// threshold span N_phi and are dropped, and the survivors give coordinates of
// lambda_phi(.) in an orthonormal basis of H_phi. pi_phi(a) is the unique
// operator with pi_phi(a) lambda_phi(x) = lambda_phi(ax) for x in A0; it is
// well defined on all of H_phi exactly when lambda_phi(A0) spans H_phi.

#include <string>
#include <vector>

#include "qstar/forms.hpp"

namespace qstar {

struct GnsRep {
  int dim_h = 0;
  Matrix onb_coords;            // dim_h x d, column i = lambda_phi(B_i)
  std::vector<Matrix> rep_mats; // pi_phi(B_i), dim_h x dim_h
  Vector cyclic;                // xi_phi = lambda_phi(e)
  Matrix source_gram;
  std::string label;
  double solve_residual = 0.0;  // max ||pi(B_i) Lambda0 - lambda(B_i A0)|| relative

  Matrix rep(const Element& a) const;
  Vector lambda(const Element& a) const { return onb_coords * a.coeffs; }
};

/// Validates phi (positivity, invariance, density) and builds its GNS data.
/// Throws NotIps when validation fails, ZeroForm when the Gram matrix vanishes.
GnsRep build_gns(const QuasiAlgebra& alg, const IpsForm& phi);

/// Same construction from a Gram matrix; only density and non-vanishing are
/// checked.
GnsRep build_gns_from_gram(const QuasiAlgebra& alg, const Matrix& gram, std::string label = {});

/// Largest singular value of pi_phi(a).
double rep_norm(const GnsRep& rep, const Element& a);

/// phi_xi(a, b) = <pi(a) xi, pi(b) xi> as a Gram-kind form.
IpsForm vector_form(const QuasiAlgebra& alg, const GnsRep& rep, const Vector& xi);

struct GnsCheck {
  double reconstruction = 0.0; // max |<pi(a)xi, pi(b)xi> - phi(a,b)| / lambda_max(G)
  double star = 0.0;           // max ||pi(a*) - pi(a)^H|| / scale
  double homomorphism = 0.0;   // max ||pi(xy) - pi(x)pi(y)|| over A0 basis pairs
  double module = 0.0;         // max ||pi(ax) - pi(a)pi(x)|| over A x A0 basis pairs
  int cyclic_rank = 0;
  bool cyclic = false;
  bool passed = false;
  std::string closure_note;
};

GnsCheck verify_gns(const QuasiAlgebra& alg, const GnsRep& rep);

/// Real-linear span test: whether the vector form of xi lies in the span of
/// the polarized twists phi(a x, b y) + phi(a y, b x) of the family's
/// generators. Returns the relative least-squares residual.
double regularity_residual(const PreparedFamily& fam, const IpsForm& vector_form_of_xi);

} // namespace qstar
