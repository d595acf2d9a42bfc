#pragma once

// L^p on a finite measure space {t_1, ..., t_k} with masses m_i > 0.
//
// Functions are realized as diagonal k x k matrices, A = A0 = diagonals with
// basis {I, E_22, ..., E_kk}. A weight w >= 0 gives the form
// phi_w(f, g) = sum_i f_i conj(g_i) w_i m_i, realized as the vector state with
// weight diag(w_i m_i). Weights are measured in the weighted s-norm with
// s = p / (p - 2), s = inf at p = 2.

#include <cstdint>
#include <vector>

#include "qstar/bounded.hpp"

namespace qstar {

struct DiscreteLpAlgebra {
  int k = 0;
  std::vector<double> points;
  RealVector masses;
  double p = 2.0;
  double s = 0.0;          // meaningful when !s_infinite
  bool s_infinite = false; // p == 2
};

struct LpModel {
  DiscreteLpAlgebra lp;
  QuasiAlgebraInstance instance;
};

/// Throws BadExponent (p < 2 or not finite) and BadMeasure (non-positive or
/// non-finite mass, size mismatch, empty support).
LpModel build_lp_instance(std::vector<double> points, const RealVector& masses, double p);

/// (sum |f_i|^q m_i)^{1/q}; max |f_i| for q = inf.
double lp_norm(const Vector& f, const RealVector& masses, double q);

/// Weighted s-norm of a weight; max w_i when s is infinite.
double weight_norm(const DiscreteLpAlgebra& lp, const RealVector& w);

/// Throws InvalidArgument on negative or mis-sized weights.
IpsForm weight_form(const DiscreteLpAlgebra& lp, const RealVector& w);

/// Diagonal element diag(f).
Element lp_element(const QuasiAlgebra& alg, const Vector& f);

struct HolderResult {
  double value = 0.0;   // sum |f_i|^2 w*_i m_i
  RealVector w_star;    // ||w*||_s = 1
  double norm_p_sq = 0.0; // ||f||_p^2
  double rel_gap = 0.0;   // |value - ||f||_p^2| / ||f||_p^2
};

/// sup { sum |f_i|^2 w_i m_i : w >= 0, ||w||_s = 1 } through the extremal
/// weight w* ~ |f|^{p-2} (w* = 1 when s is infinite).
HolderResult holder_sup(const Vector& f, const DiscreteLpAlgebra& lp);

/// Best feasible value found by projected gradient ascent from several seeded
/// starting weights. Every iterate is feasible, so the result is a lower bound.
double holder_ascent_oracle(const Vector& f, const DiscreteLpAlgebra& lp, int iterations = 400,
                            std::uint64_t seed = 0xA11CE);

struct LpNormResult {
  double value = 0.0;   // max |f_i|
  double generic = 0.0; // m_bounded_norm of diag(f) for the weight family
  double rel_diff = 0.0;
};

/// ||f||_inf, checked against the generic bounded norm for the family of
/// weight forms. Throws NotSufficient when some point carries no weight, and
/// CharacterizationMismatch when the two values disagree.
LpNormResult lp_bounded_norm(const Vector& f, const LpModel& model, const std::vector<RealVector>& weights);

/// p^F over the unit ball of weights: sqrt(holder_sup) = ||f||_p.
double lp_upper_seminorm(const Vector& f, const DiscreteLpAlgebra& lp);

/// p_F over the unit ball of weights: sup_w |sum f_i w_i m_i|, equal to
/// sup_theta ||(Re e^{-i theta} f)_+||_{p/2}; ||f||_{p/2} when f >= 0.
double lp_lower_seminorm(const Vector& f, const DiscreteLpAlgebra& lp);

} // namespace qstar
