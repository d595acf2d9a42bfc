#include "qstar/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "qstar/linalg.hpp"

namespace qstar {

namespace {

double objective(const Vector& f, const DiscreteLpAlgebra& lp, const RealVector& w) {
  double v = 0.0;
  for (int i = 0; i < lp.k; ++i) v += std::norm(f(i)) * w(i) * lp.masses(i);
  return v;
}

RealVector normalize_weight(const DiscreteLpAlgebra& lp, RealVector w) {
  const double n = weight_norm(lp, w);
  if (n > 0.0) w /= n;
  return w;
}

} // namespace

LpModel build_lp_instance(std::vector<double> points, const RealVector& masses, double p) {
  if (!std::isfinite(p) || p < 2.0) {
    throw Error(ErrorKind::BadExponent, "exponent p must be finite and >= 2");
  }
  const int k = static_cast<int>(masses.size());
  if (k == 0) throw Error(ErrorKind::BadMeasure, "measure has no points");
  if (!points.empty() && static_cast<int>(points.size()) != k) {
    throw Error(ErrorKind::BadMeasure, "points and masses differ in length");
  }
  for (int i = 0; i < k; ++i) {
    if (!std::isfinite(masses(i)) || masses(i) <= 0.0) {
      throw Error(ErrorKind::BadMeasure, "mass at point " + std::to_string(i) + " is not positive");
    }
  }
  if (points.empty()) {
    for (int i = 0; i < k; ++i) points.push_back(i);
  }

  LpModel model;
  model.lp.k = k;
  model.lp.points = std::move(points);
  model.lp.masses = masses;
  model.lp.p = p;
  model.lp.s_infinite = p == 2.0;
  model.lp.s = model.lp.s_infinite ? 0.0 : p / (p - 2.0);

  QuasiAlgebraInstance& inst = model.instance;
  inst.n = k;
  inst.a_basis.push_back(Matrix::Identity(k, k));
  for (int i = 1; i < k; ++i) inst.a_basis.push_back(matrix_unit(k, i, i));
  for (int i = 0; i < k; ++i) inst.a0_indices.push_back(i);
  inst.unit_index = 0;
  inst.label = "L^p diagonal model, k = " + std::to_string(k);
  return model;
}

double lp_norm(const Vector& f, const RealVector& masses, double q) {
  if (std::isinf(q)) return f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s += std::pow(std::abs(f(i)), q) * masses(i);
  return std::pow(s, 1.0 / q);
}

double weight_norm(const DiscreteLpAlgebra& lp, const RealVector& w) {
  if (lp.s_infinite) return w.size() ? w.maxCoeff() : 0.0;
  double s = 0.0;
  for (int i = 0; i < lp.k; ++i) s += std::pow(w(i), lp.s) * lp.masses(i);
  return std::pow(s, 1.0 / lp.s);
}

IpsForm weight_form(const DiscreteLpAlgebra& lp, const RealVector& w) {
  if (w.size() != lp.k) throw Error(ErrorKind::InvalidArgument, "weight has wrong length");
  if ((w.array() < 0.0).any()) throw Error(ErrorKind::InvalidArgument, "weight has a negative entry");
  const RealVector d = w.cwiseProduct(lp.masses);
  return IpsForm::vector_state(d.cast<cplx>().asDiagonal().toDenseMatrix(), "weight form");
}

Element lp_element(const QuasiAlgebra& alg, const Vector& f) {
  return alg.from_matrix(f.asDiagonal().toDenseMatrix());
}

HolderResult holder_sup(const Vector& f, const DiscreteLpAlgebra& lp) {
  HolderResult r;
  r.norm_p_sq = std::pow(lp_norm(f, lp.masses, lp.p), 2.0);
  RealVector w(lp.k);
  if (lp.s_infinite || r.norm_p_sq == 0.0) {
    w.setOnes();
  } else {
    for (int i = 0; i < lp.k; ++i) w(i) = std::pow(std::abs(f(i)), lp.p - 2.0);
  }
  r.w_star = normalize_weight(lp, w);
  r.value = objective(f, lp, r.w_star);
  r.rel_gap = r.norm_p_sq > 0.0 ? std::abs(r.value - r.norm_p_sq) / r.norm_p_sq : r.value;
  return r;
}

double holder_ascent_oracle(const Vector& f, const DiscreteLpAlgebra& lp, int iterations, std::uint64_t seed) {
  RealVector g(lp.k);
  for (int i = 0; i < lp.k; ++i) g(i) = std::norm(f(i)) * lp.masses(i);
  const double gmax = g.maxCoeff();
  if (gmax == 0.0) return 0.0;
  g /= gmax;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<RealVector> starts;
  starts.push_back(RealVector::Ones(lp.k));
  for (int t = 0; t < 4; ++t) {
    RealVector w(lp.k);
    for (int i = 0; i < lp.k; ++i) w(i) = unif(rng) + 1e-3;
    starts.push_back(w);
  }

  double best = 0.0;
  for (RealVector w : starts) {
    w = normalize_weight(lp, w);
    best = std::max(best, objective(f, lp, w));
    for (int it = 0; it < iterations; ++it) {
      const double step = 1.0 / (1.0 + it);
      RealVector next = (w + step * g).cwiseMax(0.0);
      if (lp.s_infinite) next = next.cwiseMin(1.0);
      next = normalize_weight(lp, next);
      w = next;
      best = std::max(best, objective(f, lp, w));
    }
  }
  return best;
}

LpNormResult lp_bounded_norm(const Vector& f, const LpModel& model, const std::vector<RealVector>& weights) {
  const DiscreteLpAlgebra& lp = model.lp;
  if (f.size() != lp.k) throw Error(ErrorKind::InvalidArgument, "function has wrong length");
  RealVector cover = RealVector::Zero(lp.k);
  FormFamily fam;
  fam.label = "weight forms";
  for (const auto& w : weights) {
    fam.generators.push_back(weight_form(lp, w));
    cover += w;
  }
  for (int i = 0; i < lp.k; ++i) {
    if (!(cover(i) > 0.0)) {
      throw Error(ErrorKind::NotSufficient, "point " + std::to_string(i) + " carries no weight in any form");
    }
  }
  const QuasiAlgebra alg(model.instance);
  const FamilyContext ctx(alg, fam);
  LpNormResult r;
  r.value = lp_norm(f, lp.masses, std::numeric_limits<double>::infinity());
  r.generic = m_bounded_norm(ctx, lp_element(alg, f)).norm;
  r.rel_diff = linalg::rel_diff(r.value, r.generic);
  if (!linalg::close(r.value, r.generic, alg.tolerances().cross_check)) {
    throw Error(ErrorKind::CharacterizationMismatch, "sup norm and generic bounded norm disagree");
  }
  return r;
}

double lp_upper_seminorm(const Vector& f, const DiscreteLpAlgebra& lp) {
  return std::sqrt(holder_sup(f, lp).value);
}

double lp_lower_seminorm(const Vector& f, const DiscreteLpAlgebra& lp) {
  const double q = lp.p / 2.0;
  auto g = [&](double theta) {
    const cplx rot = std::polar(1.0, -theta);
    Vector part(lp.k);
    for (int i = 0; i < lp.k; ++i) part(i) = std::max(0.0, (rot * f(i)).real());
    return lp_norm(part, lp.masses, q);
  };
  constexpr int grid = 720;
  const double step = 2.0 * std::numbers::pi / grid;
  int best_i = 0;
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double v = g(i * step);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double lo = (best_i - 1) * step, hi = (best_i + 1) * step;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
    const double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    const double f1 = g(x1), f2 = g(x2);
    best = std::max({best, f1, f2});
    if (f1 < f2) lo = x1;
    else hi = x2;
  }
  return best;
}

} // namespace qstar
