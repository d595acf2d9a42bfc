#include "qstar/bounded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qstar/linalg.hpp"
#include "qstar/parallel.hpp"

namespace qstar {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Rows (generator g, column k, row j) = (E0^H G_g R_k c)_j, each generator
// block scaled by 1 / ||G_g||.
Matrix weak_system(const FamilyContext& ctx, std::vector<double>* scales = nullptr) {
  const QuasiAlgebra& alg = ctx.algebra();
  const int d = alg.dim();
  const int d0 = alg.a0_dim();
  const auto& grams = ctx.prepared().generator_grams();
  Matrix s(static_cast<Eigen::Index>(grams.size()) * d0 * d0, d);
  Eigen::Index row = 0;
  for (const auto& g : grams) {
    double scale = linalg::spectral_norm(g);
    if (scale == 0.0) scale = 1.0;
    if (scales) scales->push_back(scale);
    const Matrix eg = alg.a0_selector().adjoint() * g / scale;
    for (int k = 0; k < d0; ++k) {
      s.middleRows(row, d0) = eg * alg.right_mult(k);
      row += d0;
    }
  }
  return s;
}

Matrix rep_system(const FamilyContext& ctx) {
  const int d = ctx.algebra().dim();
  Eigen::Index rows = 0;
  for (const auto& r : ctx.reps()) rows += static_cast<Eigen::Index>(r.dim_h) * r.dim_h;
  Matrix s(rows, d);
  Eigen::Index row = 0;
  for (const auto& r : ctx.reps()) {
    const Eigen::Index sz = static_cast<Eigen::Index>(r.dim_h) * r.dim_h;
    for (int i = 0; i < d; ++i) s.block(row, i, sz, 1) = linalg::vec(r.rep_mats[static_cast<size_t>(i)]);
    row += sz;
  }
  return s;
}

Vector rep_rhs(const FamilyContext& ctx, const Element& a, const Element& b) {
  Eigen::Index rows = 0;
  for (const auto& r : ctx.reps()) rows += static_cast<Eigen::Index>(r.dim_h) * r.dim_h;
  Vector v(rows);
  Eigen::Index row = 0;
  for (const auto& r : ctx.reps()) {
    const Vector p = linalg::vec(r.rep(a) * r.rep(b));
    v.segment(row, p.size()) = p;
    row += p.size();
  }
  return v;
}

// sqrt(sum ||pi(a)||_F^2 ||pi(b)||_F^2), an upper bound for the norm of rep_rhs.
double rep_product_bound(const FamilyContext& ctx, const Element& a, const Element& b) {
  double acc = 0.0;
  for (const auto& r : ctx.reps()) acc += r.rep(a).squaredNorm() * r.rep(b).squaredNorm();
  return std::sqrt(acc);
}

double relative_to(double residual, double scale) { return scale > 0.0 ? residual / scale : residual; }

double max_abs_eigen(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  const auto e = linalg::hermitian_eigen(h);
  return std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
}

double max_eigen(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  const auto e = linalg::hermitian_eigen(h);
  return e.values(e.values.size() - 1);
}

} // namespace

FamilyContext::FamilyContext(const QuasiAlgebra& alg, FormFamily family) : prepared_(alg, std::move(family)) {
  const FormFamily& fam = prepared_.family();
  if (fam.generators.empty()) throw Error(ErrorKind::EmptyFamily, "family has no generators");
  for (size_t i = 0; i < fam.generators.size(); ++i) {
    const IpsForm& phi = fam.generators[i];
    const FormReport fr = validate_ips_form(alg, phi);
    if (fr.rank_a == 0) throw Error(ErrorKind::ZeroForm, "generator " + std::to_string(i) + " vanishes");
    if (!fr.accepted) {
      throw Error(ErrorKind::NotIps, "generator " + std::to_string(i) + " ('" + phi.label + "') is not an ips-form");
    }
    reps_.push_back(build_gns_from_gram(alg, prepared_.generator_grams()[i], phi.label));
  }
  const Matrix& e0 = alg.a0_selector();
  for (const auto& m : prepared_.members()) {
    whiteners_.push_back(linalg::range_whitener(e0.adjoint() * m.gram * e0, alg.tolerances().rank));
  }
  sufficiency_ = check_sufficiency(prepared_);
}

Matrix cone_matrix(const QuasiAlgebra& alg, const Matrix& gram, const Element& a) {
  return alg.a0_selector().adjoint() * gram * alg.right_orbit(a);
}

ConeReport cone_membership(const FamilyContext& ctx, const Element& a) {
  if (!ctx.family().balanced) {
    throw Error(ErrorKind::FamilyNotBalanced, "the cone K_M is defined for balanced families");
  }
  const QuasiAlgebra& alg = ctx.algebra();
  const double eps = alg.tolerances().psd;
  const Matrix ta = alg.right_orbit(a);
  const Matrix& e0 = alg.a0_selector();
  ConeReport rep;
  rep.member = true;
  const auto& grams = ctx.prepared().generator_grams();
  for (size_t g = 0; g < grams.size(); ++g) {
    const Matrix q = e0.adjoint() * grams[g] * ta;
    const double qn = q.norm();
    const Matrix skew = (q - q.adjoint()) / cplx(0.0, 2.0);
    const double herm = qn > 0.0 ? 2.0 * skew.norm() / qn : 0.0;
    const auto eig = linalg::hermitian_eigen(q);
    const double lo = eig.values(0);
    const double top = std::max(std::abs(lo), std::abs(eig.values(eig.values.size() - 1)));
    const double margin = top > 0.0 ? lo / top : 1.0;
    rep.min_eigenvalues.push_back(lo);
    rep.margins.push_back(margin);
    rep.hermitian_residuals.push_back(herm);

    const bool herm_ok = herm <= eps;
    const bool psd_ok = margin >= -eps;
    if (herm_ok && psd_ok) continue;
    rep.member = false;
    if (rep.witness) continue;

    // extremal direction of phi(ax,x) / phi(x,x) on the range of the A0 Gram
    const Matrix g0 = e0.adjoint() * grams[g] * e0;
    Matrix w0 = linalg::range_whitener(g0, alg.tolerances().rank);
    if (w0.cols() == 0) w0 = Matrix::Identity(g0.rows(), g0.cols());
    Vector y;
    if (!herm_ok) {
      const auto se = linalg::hermitian_eigen(w0.adjoint() * skew * w0);
      const Eigen::Index last = se.values.size() - 1;
      y = w0 * (std::abs(se.values(0)) >= std::abs(se.values(last)) ? se.vectors.col(0) : se.vectors.col(last));
    } else {
      y = w0 * linalg::hermitian_eigen(w0.adjoint() * q * w0).vectors.col(0);
    }
    // scale so the first largest matrix entry of x is 1
    const Matrix xm = alg.from_a0_coordinates(y).matrix;
    const double big = xm.cwiseAbs().maxCoeff();
    for (Eigen::Index c = 0, done = 0; c < xm.cols() && !done; ++c)
      for (Eigen::Index r = 0; r < xm.rows(); ++r)
        if (std::abs(xm(r, c)) >= (1.0 - 1e-9) * big) {
          y /= xm(r, c);
          done = 1;
          break;
        }
    ConeWitness w;
    w.generator = static_cast<int>(g);
    w.x_coords = y;
    w.x = alg.from_a0_coordinates(y);
    w.value = y.dot(q * y);
    w.hermitian_failure = !herm_ok;
    rep.witness = std::move(w);
  }
  return rep;
}

Matrix cone_lineality(const FamilyContext& ctx) {
  return linalg::null_space(weak_system(ctx), std::sqrt(ctx.algebra().tolerances().rank));
}

double numerical_radius(const Matrix& t) {
  if (t.size() == 0) return 0.0;
  auto f = [&](double theta) {
    const Matrix h = (std::polar(1.0, theta) * t + std::polar(1.0, -theta) * t.adjoint()) * 0.5;
    return max_eigen(h);
  };
  constexpr int grid = 128;
  const double step = 2.0 * std::numbers::pi / grid;
  int best_i = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double v = f(i * step);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  // golden-section refinement on the bracketing cell pair
  double lo = (best_i - 1) * step, hi = (best_i + 1) * step;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max({best, f1, f2, 0.0});
}

BoundednessReport m_bounded_norm(const FamilyContext& ctx, const Element& a) {
  if (!ctx.sufficiency().sufficient) {
    throw Error(ErrorKind::NotSufficient, "family is not sufficient; ||.||_b^M is not a norm");
  }
  const QuasiAlgebra& alg = ctx.algebra();
  const Tolerances& tol = alg.tolerances();
  const Matrix& e0 = alg.a0_selector();
  const Matrix ta = alg.right_orbit(a);
  const auto [re, im] = hermitian_parts(alg, a);
  const Matrix tre = alg.right_orbit(re);
  const Matrix tim = alg.right_orbit(im);

  BoundednessReport r;
  const auto& members = ctx.prepared().members();
  for (size_t m = 0; m < members.size(); ++m) {
    const Matrix& g = members[m].gram;
    const Matrix& w = ctx.whitener(m);
    if (w.cols() == 0) {
      r.member_norms.push_back(0.0);
      continue;
    }
    const Matrix eg = e0.adjoint() * g;
    const Matrix c = w.adjoint() * eg * ta * w;
    const Matrix dfull = ta.adjoint() * g * ta;
    const Matrix dw = w.adjoint() * dfull * w;
    const Matrix hre = w.adjoint() * eg * tre * w;
    const Matrix him = w.adjoint() * eg * tim * w;
    const Matrix h = hre + I_unit * him;
    const Eigen::Index k = h.rows();
    Matrix dil = Matrix::Zero(2 * k, 2 * k);
    dil.topRightCorner(k, k) = h.adjoint();
    dil.bottomLeftCorner(k, k) = h;

    const double nf = linalg::spectral_norm(c);
    r.member_norms.push_back(nf);
    r.norm_forms = std::max(r.norm_forms, nf);
    r.gamma_prime = std::max(r.gamma_prime, std::max(0.0, max_eigen(dw)));
    r.gamma_re = std::max(r.gamma_re, max_abs_eigen(hre));
    r.gamma_im = std::max(r.gamma_im, max_abs_eigen(him));
    r.norm_order = std::max(r.norm_order, max_abs_eigen(dil));
    r.gamma_second = std::max(r.gamma_second, numerical_radius(c));

    const Matrix g0 = e0.adjoint() * g * e0;
    const Matrix z = linalg::null_space(g0, tol.rank);
    if (z.cols() > 0 && z.cols() < g0.cols()) {
      const double dn = max_eigen(dfull);
      if (dn > 0.0) r.null_leak = std::max(r.null_leak, std::sqrt(std::max(0.0, max_eigen(z.adjoint() * dfull * z)) / dn));
    }
  }
  for (const auto& rep : ctx.reps()) r.norm_reps = std::max(r.norm_reps, rep_norm(rep, a));
  r.gamma = r.norm_forms;

  const double routes[4] = {r.norm_forms, r.norm_reps, std::sqrt(r.gamma_prime), r.norm_order};
  const double hi = *std::max_element(routes, routes + 4);
  const double lo = *std::min_element(routes, routes + 4);
  r.max_route_disagreement = hi > 1e-300 ? (hi - lo) / hi : 0.0;
  const bool agree = hi - lo <= 1e-14 || r.max_route_disagreement <= tol.cross_check;
  if (!agree) {
    throw Error(ErrorKind::CharacterizationMismatch,
                "bounded-norm routes disagree: forms " + fmt(routes[0]) + ", representations " + fmt(routes[1]) +
                    ", strong " + fmt(routes[2]) + ", order " + fmt(routes[3]));
  }
  for (int i = 0; i < 4; ++i) r.verdicts[static_cast<size_t>(i)] = std::isfinite(routes[i]);
  r.bounded = r.verdicts[0] && r.verdicts[1] && r.verdicts[2] && r.verdicts[3];
  r.norm = r.norm_forms;

  const double slack = 1.0 + 1e-8;
  const double sg = std::sqrt(r.gamma_prime);
  const double floor = 1e-13 * std::max(1.0, hi);
  r.chain_ok = std::max(r.gamma_re, r.gamma_im) <= r.gamma_second * slack + floor &&
               r.gamma_second <= sg * slack + floor && sg <= 2.0 * r.gamma_second * slack + floor;
  return r;
}

WeakProductResult solve_weak_product(const FamilyContext& ctx, const Element& a, const Element& b) {
  const QuasiAlgebra& alg = ctx.algebra();
  const int d0 = alg.a0_dim();
  std::vector<double> scales;
  const Matrix s = weak_system(ctx, &scales);
  const Matrix tas = alg.right_orbit(alg.adjoint(a));
  const Matrix tb = alg.right_orbit(b);
  Vector rhs(s.rows());
  const auto& grams = ctx.prepared().generator_grams();
  Eigen::Index row = 0;
  double cs_sq = 0.0; // Cauchy-Schwarz bound on ||rhs||^2
  for (size_t g = 0; g < grams.size(); ++g) {
    const Matrix target = tas.adjoint() * grams[g] * tb / scales[g]; // (j, k) = phi(b x_k, a* y_j)
    rhs.segment(row, static_cast<Eigen::Index>(d0) * d0) = linalg::vec(target);
    row += static_cast<Eigen::Index>(d0) * d0;
    const double ta = std::abs((tas.adjoint() * grams[g] * tas).trace());
    const double tbb = std::abs((tb.adjoint() * grams[g] * tb).trace());
    cs_sq += ta * tbb / (scales[g] * scales[g]);
  }
  const auto ls = linalg::least_squares(s, rhs, alg.tolerances().rank);
  WeakProductResult out;
  out.product = alg.element(ls.solution);
  out.relative_residual = relative_to(ls.residual, std::max(ls.rhs_norm, std::sqrt(cs_sq)));
  out.rank = ls.rank;
  out.unknowns = ls.unknowns;
  return out;
}

Element weak_product(const FamilyContext& ctx, const Element& a, const Element& b) {
  const WeakProductResult r = solve_weak_product(ctx, a, b);
  if (r.rank < r.unknowns) {
    throw Error(ErrorKind::AmbiguousProduct, "weak product system has rank " + std::to_string(r.rank) + " < " +
                                                 std::to_string(r.unknowns) + "; the family does not separate A");
  }
  if (r.relative_residual > ctx.algebra().tolerances().weak) {
    throw Error(ErrorKind::NotWellDefined,
                "no c in A satisfies phi(c x, y) = phi(b x, a* y); relative residual " + fmt(r.relative_residual));
  }
  return r.product;
}

std::optional<Element> try_weak_product(const FamilyContext& ctx, const Element& a, const Element& b) {
  const WeakProductResult r = solve_weak_product(ctx, a, b);
  if (r.rank < r.unknowns || r.relative_residual > ctx.algebra().tolerances().weak) return std::nullopt;
  return r.product;
}

WeakProductResult solve_rep_product(const FamilyContext& ctx, const Element& a, const Element& b) {
  const QuasiAlgebra& alg = ctx.algebra();
  const auto ls = linalg::least_squares(rep_system(ctx), rep_rhs(ctx, a, b), alg.tolerances().rank);
  WeakProductResult out;
  out.product = alg.element(ls.solution);
  out.relative_residual = relative_to(ls.residual, std::max(ls.rhs_norm, rep_product_bound(ctx, a, b)));
  out.rank = ls.rank;
  out.unknowns = ls.unknowns;
  return out;
}

ConditionCReport check_condition_C(const FamilyContext& ctx, const std::vector<Element>& probes) {
  const QuasiAlgebra& alg = ctx.algebra();
  const Tolerances& tol = alg.tolerances();
  const Matrix s = rep_system(ctx);
  Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(tol.rank);
  const bool unique = svd.rank() == alg.dim();

  const size_t np = probes.size();
  std::vector<double> residuals(np * np, 0.0);
  parallel_for(np * np, [&](size_t idx) {
    const Element& a = probes[idx / np];
    const Element& b = probes[idx % np];
    const Vector rhs = rep_rhs(ctx, a, b);
    const Vector c = svd.solve(rhs);
    residuals[idx] = relative_to((s * c - rhs).norm(), std::max(rhs.norm(), rep_product_bound(ctx, a, b)));
  });

  ConditionCReport rep;
  rep.pairs_checked = np * np;
  for (size_t idx = 0; idx < residuals.size(); ++idx) {
    rep.max_residual = std::max(rep.max_residual, residuals[idx]);
    if (residuals[idx] > tol.weak) rep.failures.push_back({idx / np, idx % np, residuals[idx], unique});
  }
  rep.passed = rep.failures.empty();
  rep.quantifier = "pi_phi(a) pi_phi(b) in pi_phi(A) simultaneously for every generator phi";
  return rep;
}

bool same_subspace(const Matrix& u, const Matrix& v, double tol) {
  if (u.cols() != v.cols()) return false;
  if (u.cols() == 0) return true;
  const double duv = (u - v * (v.adjoint() * u)).norm();
  const double dvu = (v - u * (u.adjoint() * v)).norm();
  return std::max(duv, dvu) <= tol * std::sqrt(static_cast<double>(u.cols()));
}

RadicalReport radical(const FamilyContext& ctx) {
  const QuasiAlgebra& alg = ctx.algebra();
  const Tolerances& tol = alg.tolerances();
  const int d = alg.dim();
  std::vector<Matrix> grams;
  for (const auto& m : ctx.prepared().members()) grams.push_back(m.gram);

  RadicalReport r;
  r.basis = common_null_space(grams, d, tol.rank);
  r.dim = static_cast<int>(r.basis.cols());

  r.operator_kernel = linalg::null_space(rep_system(ctx), std::sqrt(tol.rank));
  r.operator_kernel_dim = static_cast<int>(r.operator_kernel.cols());

  Eigen::Index rows = 0;
  for (const auto& rep : ctx.reps()) rows += rep.dim_h;
  Matrix lam(rows, d);
  Eigen::Index row = 0;
  for (const auto& rep : ctx.reps()) {
    lam.middleRows(row, rep.dim_h) = rep.onb_coords;
    row += rep.dim_h;
  }
  r.cyclic_kernel = linalg::null_space(lam, std::sqrt(tol.rank));
  r.cyclic_kernel_dim = static_cast<int>(r.cyclic_kernel.cols());

  if (ctx.family().balanced) {
    r.matches = same_subspace(r.basis, r.operator_kernel, 1e-6);
    r.comparison = "intersection of ker pi_phi over generators";
  } else {
    r.matches = same_subspace(r.basis, r.cyclic_kernel, 1e-6);
    r.comparison = "intersection of {a : pi_phi(a) xi_phi = 0} over generators";
  }
  return r;
}

BoundedAlgebraReport extract_bounded_algebra(const FamilyContext& ctx, const std::vector<Element>& probes) {
  if (!ctx.sufficiency().sufficient) {
    throw Error(ErrorKind::NotSufficient, "family is not sufficient; the bounded part carries no norm");
  }
  const QuasiAlgebra& alg = ctx.algebra();
  const double eps = alg.tolerances().cross_check;
  BoundedAlgebraReport r;
  r.all_bounded = true;
  for (int i = 0; i < alg.dim(); ++i) {
    const auto br = m_bounded_norm(ctx, alg.basis_element(i));
    r.basis_norms.push_back(br.norm);
    r.all_bounded = r.all_bounded && br.bounded;
  }

  const size_t np = probes.size();
  std::vector<double> norm(np), adj_norm(np), sum_norm(np), prod_norm(np, -1.0), cstar_norm(np, -1.0);
  parallel_for(np, [&](size_t i) {
    const Element& a = probes[i];
    const Element& b = probes[(i + 1) % np];
    norm[i] = m_bounded_norm(ctx, a).norm;
    adj_norm[i] = m_bounded_norm(ctx, alg.adjoint(a)).norm;
    sum_norm[i] = m_bounded_norm(ctx, a + b).norm;
    if (auto ab = try_weak_product(ctx, a, b)) prod_norm[i] = m_bounded_norm(ctx, *ab).norm;
    if (auto aa = try_weak_product(ctx, alg.adjoint(a), a)) cstar_norm[i] = m_bounded_norm(ctx, *aa).norm;
  });

  for (size_t i = 0; i < np; ++i) {
    const size_t j = (i + 1) % np;
    const double scale = std::max(norm[i] + norm[j], 1e-300);
    if (norm[i] > 0.0) r.max_adjoint_defect = std::max(r.max_adjoint_defect, std::abs(adj_norm[i] - norm[i]) / norm[i]);
    r.max_triangle_excess = std::max(r.max_triangle_excess, std::max(0.0, sum_norm[i] - norm[i] - norm[j]) / scale);
    if (prod_norm[i] >= 0.0) {
      ++r.products_resolved;
      const double ps = std::max(norm[i] * norm[j], 1e-300);
      r.max_submult_excess = std::max(r.max_submult_excess, std::max(0.0, prod_norm[i] - norm[i] * norm[j]) / ps);
    }
    if (cstar_norm[i] >= 0.0) {
      CstarSample s;
      s.probe = i;
      s.norm_sq = norm[i] * norm[i];
      s.product_norm = cstar_norm[i];
      s.rel_error = linalg::rel_diff(s.norm_sq, s.product_norm);
      r.max_cstar_error = std::max(r.max_cstar_error, s.rel_error);
      r.cstar.push_back(s);
    }
  }
  r.normed_star_algebra = r.all_bounded && r.max_adjoint_defect <= eps && r.max_triangle_excess <= eps &&
                          r.max_submult_excess <= eps;
  r.cstar_identity = !r.cstar.empty() && r.max_cstar_error <= eps;
  r.completeness_note = "finite-dimensional normed space, hence complete";
  return r;
}

} // namespace qstar
