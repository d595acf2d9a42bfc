#include "qstar/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qstar/linalg.hpp"
#include "qstar/parallel.hpp"

namespace qstar {

namespace {

double quad(const Matrix& g, const Vector& c) { return std::max(0.0, c.dot(g * c).real()); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double certificate(const QuasiAlgebra& alg, const std::vector<Matrix>& grams) {
  double c = 0.0;
  for (const auto& g : grams)
    for (int i = 0; i < alg.dim(); ++i) c = std::max(c, g(i, i).real());
  return c;
}

Element unit_or(const QuasiAlgebra& alg, const std::optional<Element>& x) {
  if (!x) return alg.unit();
  if (!alg.in_a0(*x)) throw Error(ErrorKind::NotInA0, "seminorm parameter is not in A0");
  return *x;
}

} // namespace

std::string to_string(SeminormKind k) {
  switch (k) {
  case SeminormKind::PUpper: return "p_upper";
  case SeminormKind::PLower: return "p_lower";
  case SeminormKind::PStar: return "p_star";
  case SeminormKind::TauW: return "tau_w";
  case SeminormKind::TauS: return "tau_s";
  case SeminormKind::TauSStar: return "tau_sstar";
  }
  return "unknown";
}

BoundedFormSet make_bounded_set(const QuasiAlgebra& alg, const std::vector<IpsForm>& forms) {
  BoundedFormSet f;
  for (const auto& phi : forms) {
    const FormReport fr = validate_ips_form(alg, phi);
    if (!fr.positive || !fr.invariant) {
      throw Error(ErrorKind::NotIps, "bounded set member '" + phi.label + "' is not positive and invariant");
    }
    f.grams.push_back(gram_matrix(alg, phi));
    f.labels.push_back(phi.label);
  }
  f.bound_certificate = certificate(alg, f.grams);
  return f;
}

BoundedFormSet bounded_set_from_family(const PreparedFamily& fam) {
  BoundedFormSet f;
  for (const auto& m : fam.members()) {
    f.grams.push_back(m.gram);
    f.labels.push_back(m.label);
  }
  f.bound_certificate = certificate(fam.algebra(), f.grams);
  return f;
}

double p_upper(const BoundedFormSet& f, const Element& a) {
  double v = 0.0;
  for (const auto& g : f.grams) v = std::max(v, quad(g, a.coeffs));
  return std::sqrt(v);
}

double p_lower(const QuasiAlgebra& alg, const BoundedFormSet& f, const Element& a) {
  const Vector e = alg.unit().coeffs;
  double v = 0.0;
  for (const auto& g : f.grams) v = std::max(v, std::abs(e.dot(g * a.coeffs)));
  return v;
}

double p_star(const QuasiAlgebra& alg, const BoundedFormSet& f, const Element& a) {
  return std::max(p_upper(f, a), p_upper(f, alg.adjoint(a)));
}

double gamma_F(const QuasiAlgebra& alg, const BoundedFormSet& f) { return p_upper(f, alg.unit()); }

SeminormValue seminorm_eval(const QuasiAlgebra& alg, SeminormKind kind, const SeminormParams& params,
                            const Element& a) {
  SeminormValue out{kind, 0.0};
  switch (kind) {
  case SeminormKind::PUpper:
  case SeminormKind::PLower:
  case SeminormKind::PStar: {
    if (!params.set) throw Error(ErrorKind::InvalidArgument, to_string(kind) + " needs a bounded form set");
    if (kind == SeminormKind::PUpper) out.value = p_upper(*params.set, a);
    else if (kind == SeminormKind::PLower) out.value = p_lower(alg, *params.set, a);
    else out.value = p_star(alg, *params.set, a);
    return out;
  }
  case SeminormKind::TauW:
  case SeminormKind::TauS:
  case SeminormKind::TauSStar: {
    if (params.gram.rows() != alg.dim() || params.gram.cols() != alg.dim()) {
      throw Error(ErrorKind::InvalidArgument, to_string(kind) + " needs a form Gram matrix");
    }
    const Element x = unit_or(alg, params.x);
    const Matrix rx = alg.right_mult_by(x);
    if (kind == SeminormKind::TauW) {
      const Element y = unit_or(alg, params.y);
      out.value = std::abs(y.coeffs.dot(params.gram * (rx * a.coeffs)));
    } else {
      out.value = std::sqrt(quad(params.gram, rx * a.coeffs));
      if (kind == SeminormKind::TauSStar)
        out.value = std::max(out.value, std::sqrt(quad(params.gram, rx * alg.adjoint(a).coeffs)));
    }
    return out;
  }
  }
  return out;
}

BoundedFormSet twisted_family(const QuasiAlgebra& alg, const BoundedFormSet& f, const Element& x) {
  if (!alg.in_a0(x)) throw Error(ErrorKind::NotInA0, "twisting element is not in A0");
  const Matrix rx = alg.right_mult_by(x);
  BoundedFormSet out;
  for (size_t i = 0; i < f.grams.size(); ++i) {
    out.grams.push_back(rx.adjoint() * f.grams[i] * rx);
    out.labels.push_back(f.labels[i] + "^x");
  }
  out.bound_certificate = certificate(alg, out.grams);
  return out;
}

double left_mult_bound(const QuasiAlgebra& alg, const Element& x, const std::vector<Matrix>& generator_grams) {
  const double rel = alg.tolerances().rank;
  const Matrix lx = alg.left_mult_by(x);
  double gamma = 0.0;
  for (const auto& g : generator_grams) {
    const Matrix p = lx.adjoint() * g * lx;
    const double ptop = linalg::spectral_norm(p);
    if (ptop == 0.0) continue;
    const Matrix z = linalg::null_space(g, rel);
    if (z.cols() > 0 && z.cols() < g.cols()) {
      if (linalg::spectral_norm(z.adjoint() * p * z) > std::sqrt(rel) * ptop)
        return std::numeric_limits<double>::infinity();
    } else if (z.cols() == g.cols()) {
      return std::numeric_limits<double>::infinity();
    }
    const Matrix w = linalg::range_whitener(g, rel);
    const auto e = linalg::hermitian_eigen(w.adjoint() * p * w);
    gamma = std::max(gamma, e.values(e.values.size() - 1));
  }
  return gamma;
}

ComparisonReport compare_topologies(const std::vector<NamedSeminorm>& p, const std::vector<NamedSeminorm>& q,
                                    const std::vector<Element>& probes) {
  ComparisonReport r;
  r.note = "empirical dominance constants on the probe set; not a proof of topology comparison";
  std::vector<double> qmax(probes.size(), 0.0);
  for (size_t i = 0; i < probes.size(); ++i)
    for (const auto& s : q) qmax[i] = std::max(qmax[i], s.eval(probes[i]));
  double qscale = 0.0;
  for (double v : qmax) qscale = std::max(qscale, v);
  const double tiny = 1e-13 * std::max(qscale, 1e-300);
  for (const auto& s : p) {
    DominanceEntry e;
    e.name = s.name;
    for (size_t i = 0; i < probes.size(); ++i) {
      const double v = s.eval(probes[i]);
      if (qmax[i] <= tiny) {
        if (v > tiny) ++e.degenerate;
        continue;
      }
      const double ratio = v / qmax[i];
      if (!e.witness || ratio > e.gamma) {
        e.gamma = ratio;
        e.witness = i;
      }
    }
    r.entries.push_back(std::move(e));
  }
  return r;
}

SeminormLawReport seminorm_laws(const FamilyContext& ctx, const std::vector<Element>& probes) {
  const QuasiAlgebra& alg = ctx.algebra();
  const BoundedFormSet f = bounded_set_from_family(ctx.prepared());
  SeminormLawReport r;
  r.probes = probes.size();
  r.gamma_F = gamma_F(alg, f);
  const double g = r.gamma_F;
  const cplx t(0.7, -1.3);
  const double rel = 1e-9;

  using Fn = std::function<double(const Element&)>;
  const std::vector<Fn> kinds = {[&](const Element& a) { return p_upper(f, a); },
                                 [&](const Element& a) { return p_lower(alg, f, a); },
                                 [&](const Element& a) { return p_star(alg, f, a); }};
  std::vector<BoundedFormSet> twisted;
  for (int k = 0; k < alg.a0_dim(); ++k) twisted.push_back(twisted_family(alg, f, alg.a0_element(k)));

  const size_t np = probes.size();
  struct Row {
    double hom = 0, tri = 0, ord = 0, adj = 0, twist = 0, cstar = -1;
  };
  std::vector<Row> rows(np);
  parallel_for(np, [&](size_t i) {
    const Element& a = probes[i];
    const Element& b = probes[(i + 1) % np];
    Row& w = rows[i];
    const double up = p_upper(f, a), lo = p_lower(alg, f, a), st = p_star(alg, f, a);
    // every seminorm here is dominated by max(1, gamma_F) p^F_*
    const double dom = std::max(1.0, g);
    const double na = dom * st, nb = dom * p_star(alg, f, b);
    for (const auto& p : kinds) {
      const double pa = p(a), pb = p(b);
      const double scale = std::max(pa + pb + na + nb, 1e-300);
      w.hom = std::max(w.hom, std::abs(p(t * a) - std::abs(t) * pa) / std::max(std::abs(t) * (pa + na), 1e-300));
      w.tri = std::max(w.tri, std::max(0.0, p(a + b) - pa - pb) / scale);
    }
    const double oscale = std::max(g * st, 1e-300);
    w.ord = std::max({0.0, (lo - g * up) / oscale, (g * up - g * st) / oscale});
    const double lo_adj = p_lower(alg, f, alg.adjoint(a));
    w.adj = std::abs(lo_adj - lo) / std::max({lo, lo_adj, na, 1e-300});
    for (int k = 0; k < alg.a0_dim(); ++k) {
      const Element ax = alg.element(alg.right_mult(k) * a.coeffs);
      const double lhs = p_upper(f, ax), rhs = p_upper(twisted[static_cast<size_t>(k)], a);
      w.twist = std::max(w.twist, std::abs(lhs - rhs) / std::max({lhs, rhs, up, 1e-300}));
    }
    if (auto c = try_weak_product(ctx, alg.adjoint(a), a)) {
      const double sq = up * up;
      w.cstar = sq > 0.0 ? std::abs(p_lower(alg, f, *c) - sq) / sq : p_lower(alg, f, *c);
    }
  });
  for (const auto& w : rows) {
    r.max_homogeneity_defect = std::max(r.max_homogeneity_defect, w.hom);
    r.max_triangle_excess = std::max(r.max_triangle_excess, w.tri);
    r.max_ordering_excess = std::max(r.max_ordering_excess, w.ord);
    r.max_lower_adjoint_defect = std::max(r.max_lower_adjoint_defect, w.adj);
    r.max_twist_defect = std::max(r.max_twist_defect, w.twist);
    if (w.cstar >= 0.0) {
      ++r.cstar_samples;
      r.max_cstar_defect = std::max(r.max_cstar_defect, w.cstar);
    }
  }

  // phi(a,a) = 0 over the effective family iff p^F(a) = 0
  const RadicalReport rad = radical(ctx);
  r.radical_coherent = true;
  for (Eigen::Index c = 0; c < rad.basis.cols(); ++c) {
    if (p_upper(f, alg.element(rad.basis.col(c))) > 1e-6 * std::max(g, 1e-300)) r.radical_coherent = false;
  }
  for (const auto& a : probes) {
    if (p_upper(f, a) <= 1e-7 * std::max(g, 1e-300) * a.coeffs.norm()) {
      const Vector rest = a.coeffs - rad.basis * (rad.basis.adjoint() * a.coeffs);
      if (rest.norm() > 1e-6 * a.coeffs.norm()) r.radical_coherent = false;
    }
  }

  for (int k = 0; k < alg.a0_dim(); ++k)
    r.left_mult_bounds.push_back(left_mult_bound(alg, alg.a0_element(k), ctx.prepared().generator_grams()));

  r.comparison = compare_topologies(
      {{"p_F", kinds[1]}, {"p^F", kinds[0]}, {"p^F_*", kinds[2]}}, {{"p^F", kinds[0]}}, probes);

  r.passed = r.max_homogeneity_defect <= rel && r.max_triangle_excess <= rel && r.max_ordering_excess <= rel &&
             r.max_lower_adjoint_defect <= rel && r.max_twist_defect <= 1e-12 && r.max_cstar_defect <= 1e-7 &&
             r.radical_coherent;
  return r;
}

const std::string& wb4_structural_note() {
  static const std::string note =
      "wb4 holds structurally: A is finite-dimensional, so every Hausdorff locally convex topology on it "
      "coincides with the norm topology; taking tau = tau^F_* makes the equivalence hold by construction";
  return note;
}

GAStarReport ga_star_check(const QuasiAlgebra& alg, const FormFamily& family, const std::vector<Element>& probes) {
  GAStarReport r;
  r.wb4_note = wb4_structural_note();
  std::optional<FamilyContext> ctx;
  try {
    ctx.emplace(alg, family);
  } catch (const Error& e) {
    r.error = std::string(e.what());
    r.checks.push_back({"wb1 sufficiency", false, *r.error, 0.0});
    r.all_passed = false;
    return r;
  }
  const double slack = 1.0 + 1e-9;

  // wb1
  const SufficiencyReport& suff = ctx->sufficiency();
  {
    HarnessCheck c{"wb1 sufficiency", suff.sufficient, "", static_cast<double>(suff.null_dim)};
    c.detail = suff.sufficient ? "common null space is trivial over " + std::to_string(suff.family_size) + " forms"
                               : "common null space has dimension " + std::to_string(suff.null_dim) +
                                     "; witness phi(a,a) max " + fmt(suff.witness_max_value);
    if (!suff.sufficient) r.witness = suff.witness;
    r.checks.push_back(std::move(c));
  }

  // wb2
  {
    HarnessCheck c{"wb2 A0 elements are M-bounded", true, "", 0.0};
    try {
      for (int k = 0; k < alg.a0_dim(); ++k) {
        const auto br = m_bounded_norm(*ctx, alg.a0_element(k));
        c.passed = c.passed && br.bounded;
        c.value = std::max(c.value, br.norm);
      }
      c.detail = "max ||x_k||_b^M = " + fmt(c.value);
    } catch (const Error& e) {
      c.passed = false;
      c.detail = std::string(e.what());
    }
    r.checks.push_back(std::move(c));
  }

  // wb3
  {
    const ConditionCReport cc = check_condition_C(*ctx, probes);
    HarnessCheck c{"wb3 condition (C)", cc.passed, "", cc.max_residual};
    c.detail = std::to_string(cc.pairs_checked) + " probe pairs, " + std::to_string(cc.failures.size()) +
               " failures, max residual " + fmt(cc.max_residual);
    r.checks.push_back(std::move(c));
  }

  r.checks.push_back({"wb4 tau equivalent to tau^F_*", true, r.wb4_note, 0.0});

  const BoundedFormSet fset = bounded_set_from_family(ctx->prepared());
  std::vector<double> pst(probes.size());
  parallel_for(probes.size(), [&](size_t i) { pst[i] = p_star(alg, fset, probes[i]); });
  double pscale = 0.0;
  for (double v : pst) pscale = std::max(pscale, v);
  const double floor = 1e-12 * std::max(pscale * pscale, 1e-300);

  // (a) |phi(a,b)| <= p^F_*(a) p^F_*(b)
  {
    HarnessCheck c{"(a) every phi in M is tau^F_*-continuous", true, "", 0.0};
    for (size_t i = 0; i < probes.size(); ++i) {
      const size_t j = (i + 1) % probes.size();
      const double bound = pst[i] * pst[j];
      for (const auto& g : fset.grams) {
        const double v = std::abs(probes[j].coeffs.dot(g * probes[i].coeffs));
        if (v > bound * slack + floor) c.passed = false;
        if (bound > 0.0) c.value = std::max(c.value, v / bound);
      }
    }
    c.detail = "max |phi(a,b)| / (p^F_*(a) p^F_*(b)) = " + fmt(c.value);
    r.checks.push_back(std::move(c));
  }

  // (b) max(||pi(a) xi||, ||pi(a)^* xi||) <= p^F_*(a)
  {
    HarnessCheck c{"(b) GNS representations are p^F_*-dominated", true, "", 0.0};
    const bool twisted = family.balanced && family.twist_depth >= 1;
    for (const auto& rep : ctx->reps()) {
      std::vector<Vector> xis;
      if (twisted)
        for (int k = 0; k < alg.a0_dim(); ++k) xis.push_back(rep.lambda(alg.a0_element(k)));
      else
        xis.push_back(rep.cyclic);
      for (size_t i = 0; i < probes.size(); ++i) {
        const Matrix pa = rep.rep(probes[i]);
        for (const auto& xi : xis) {
          const double v = std::max((pa * xi).norm(), (pa.adjoint() * xi).norm());
          if (v > pst[i] * slack + std::sqrt(floor)) c.passed = false;
          if (pst[i] > 0.0) c.value = std::max(c.value, v / pst[i]);
        }
      }
    }
    c.detail = std::string(twisted ? "xi = lambda_phi(x_k) over the A0 basis" : "xi = xi_phi") +
               "; max ratio " + fmt(c.value);
    r.checks.push_back(std::move(c));
  }

  // (c) bounded part is a C*-algebra
  {
    HarnessCheck c{"(c) bounded elements form a C*-algebra", false, "", 0.0};
    try {
      const BoundedAlgebraReport br = extract_bounded_algebra(*ctx, probes);
      c.passed = br.normed_star_algebra && br.cstar_identity;
      c.value = br.max_cstar_error;
      c.detail = std::to_string(br.cstar.size()) + " C* samples, max | ||a* o a|| - ||a||^2 | / ||a||^2 = " +
                 fmt(br.max_cstar_error) + "; " + br.completeness_note;
    } catch (const Error& e) {
      c.detail = std::string(e.what());
    }
    r.checks.push_back(std::move(c));
  }

  r.all_passed = std::all_of(r.checks.begin(), r.checks.end(), [](const HarnessCheck& c) { return c.passed; });
  return r;
}

} // namespace qstar
