#include "qstar/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qstar::io {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::ParseError, field + ": " + msg);
}

const json& require(const json& j, const char* key, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(field, std::string("missing field '") + key + "'");
  return *it;
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

double as_double(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

bool is_entry(const json& j) {
  return j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number());
}

cplx parse_entry(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(field, "expected a number or a [re, im] pair");
}

std::string fmt17(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_scalar(const json& j) { return !j.is_array() && !j.is_object(); }

void write(std::string& out, const json& j, int indent, int level) {
  const std::string pad(static_cast<size_t>(indent * (level + 1)), ' ');
  const std::string close_pad(static_cast<size_t>(indent * level), ' ');
  switch (j.type()) {
  case json::value_t::null: out += "null"; return;
  case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; return;
  case json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); return;
  case json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); return;
  case json::value_t::number_float: out += fmt17(j.get<double>()); return;
  case json::value_t::string: out += j.dump(); return;
  case json::value_t::array: {
    if (j.empty()) {
      out += "[]";
      return;
    }
    const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) {
      return is_scalar(e) || (e.is_array() && std::all_of(e.begin(), e.end(), is_scalar) && e.size() <= 2);
    });
    if (flat || indent == 0) {
      out += "[";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        write(out, j[i], 0, 0);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (size_t i = 0; i < j.size(); ++i) {
      out += pad;
      write(out, j[i], indent, level + 1);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += close_pad + "]";
    return;
  }
  case json::value_t::object: {
    if (j.empty()) {
      out += "{}";
      return;
    }
    if (indent == 0) {
      out += "{";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ", ";
        first = false;
        out += json(it.key()).dump() + ": ";
        write(out, it.value(), 0, 0);
      }
      out += "}";
      return;
    }
    out += "{\n";
    size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      out += pad + json(it.key()).dump() + ": ";
      write(out, it.value(), indent, level + 1);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += close_pad + "}";
    return;
  }
  default: out += "null"; return;
  }
}

json opt_element(const std::optional<Element>& e) { return e ? to_json(*e) : json(nullptr); }

} // namespace

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

Matrix parse_matrix(const json& j, int rows, int cols, const std::string& field) {
  if (!j.is_array()) fail(field, "expected a matrix");
  Matrix m(rows, cols);
  const bool nested = static_cast<int>(j.size()) == rows &&
                      std::all_of(j.begin(), j.end(), [&](const json& r) {
                        return r.is_array() && static_cast<int>(r.size()) == cols && !(cols != 2 && is_entry(r));
                      });
  if (nested) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        m(r, c) = parse_entry(j[static_cast<size_t>(r)][static_cast<size_t>(c)],
                              field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    return m;
  }
  if (static_cast<int>(j.size()) != rows * cols) {
    fail(field, "expected " + std::to_string(rows) + " x " + std::to_string(cols) + " entries");
  }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const size_t idx = static_cast<size_t>(r * cols + c);
      m(r, c) = parse_entry(j[idx], field + "[" + std::to_string(idx) + "]");
    }
  return m;
}

Vector parse_complex_vector(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected a list");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = parse_entry(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

RealVector parse_real_vector(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected a list");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = as_double(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

QuasiAlgebraInstance parse_instance(const json& j) {
  QuasiAlgebraInstance inst;
  inst.n = as_int(require(j, "n", "instance"), "instance.n");
  if (inst.n < 1) fail("instance.n", "must be positive");
  const json& basis = require(j, "basis", "instance");
  if (!basis.is_array() || basis.empty()) fail("instance.basis", "expected a non-empty list of matrices");
  for (size_t i = 0; i < basis.size(); ++i)
    inst.a_basis.push_back(parse_matrix(basis[i], inst.n, inst.n, "instance.basis[" + std::to_string(i) + "]"));
  const json& a0 = require(j, "a0_indices", "instance");
  if (!a0.is_array()) fail("instance.a0_indices", "expected a list");
  for (size_t i = 0; i < a0.size(); ++i) {
    const std::string f = "instance.a0_indices[" + std::to_string(i) + "]";
    const int idx = as_int(a0[i], f);
    if (idx < 0 || idx >= static_cast<int>(inst.a_basis.size())) fail(f, "index out of range");
    inst.a0_indices.push_back(idx);
  }
  inst.unit_index = as_int(require(j, "unit_index", "instance"), "instance.unit_index");
  if (inst.unit_index < 0 || inst.unit_index >= static_cast<int>(inst.a_basis.size()))
    fail("instance.unit_index", "index out of range");
  if (j.contains("label")) inst.label = j["label"].is_string() ? j["label"].get<std::string>() : "";
  return inst;
}

IpsForm parse_form(const json& j, int n, int d, const std::string& field) {
  const json& kind = require(j, "kind", field);
  if (!kind.is_string()) fail(field + ".kind", "expected a string");
  const std::string label = j.contains("label") && j["label"].is_string() ? j["label"].get<std::string>() : "";
  const std::string k = kind.get<std::string>();
  if (k == "vector_state") return IpsForm::vector_state(parse_matrix(require(j, "S", field), n, n, field + ".S"), label);
  if (k == "gram") return IpsForm::gram(parse_matrix(require(j, "G", field), d, d, field + ".G"), label);
  fail(field + ".kind", "unknown form kind '" + k + "'");
}

FormFamily parse_family(const json& j, int n, int d) {
  FormFamily fam;
  const json& gens = require(j, "generators", "family");
  if (!gens.is_array()) fail("family.generators", "expected a list");
  for (size_t i = 0; i < gens.size(); ++i)
    fam.generators.push_back(parse_form(gens[i], n, d, "family.generators[" + std::to_string(i) + "]"));
  if (j.contains("balanced")) {
    if (!j["balanced"].is_boolean()) fail("family.balanced", "expected a boolean");
    fam.balanced = j["balanced"].get<bool>();
  }
  if (j.contains("twist_depth")) {
    fam.twist_depth = as_int(j["twist_depth"], "family.twist_depth");
    if (fam.twist_depth < 0) fail("family.twist_depth", "must be non-negative");
  }
  if (j.contains("label") && j["label"].is_string()) fam.label = j["label"].get<std::string>();
  return fam;
}

LpInput parse_lp(const json& j) {
  LpInput in;
  in.masses = parse_real_vector(require(j, "masses", "lp"), "lp.masses");
  if (j.contains("points")) {
    const RealVector pts = parse_real_vector(j["points"], "lp.points");
    in.points.assign(pts.data(), pts.data() + pts.size());
  }
  in.p = as_double(require(j, "p", "lp"), "lp.p");
  in.f = parse_complex_vector(require(j, "f", "lp"), "lp.f");
  if (in.f.size() != in.masses.size()) fail("lp.f", "length differs from masses");
  if (j.contains("weights")) {
    const json& ws = j["weights"];
    if (!ws.is_array()) fail("lp.weights", "expected a list of weights");
    for (size_t i = 0; i < ws.size(); ++i) {
      const std::string f = "lp.weights[" + std::to_string(i) + "]";
      in.weights.push_back(parse_real_vector(ws[i], f));
      if (in.weights.back().size() != in.masses.size()) fail(f, "length differs from masses");
    }
  } else {
    for (Eigen::Index i = 0; i < in.masses.size(); ++i)
      in.weights.push_back(RealVector::Unit(in.masses.size(), i));
  }
  return in;
}

Element parse_element(const QuasiAlgebra& alg, const std::string& text) {
  if (text == "unit") return alg.unit();
  if (text == "zero") return alg.zero();
  auto indexed = [&](const std::string& prefix, int limit) {
    const std::string rest = text.substr(prefix.size());
    try {
      size_t pos = 0;
      const int i = std::stoi(rest, &pos);
      if (pos != rest.size() || i < 0 || i >= limit) throw std::out_of_range("index");
      return i;
    } catch (const std::exception&) {
      fail("element '" + text + "'", "index out of range");
    }
  };
  if (text.rfind("basis:", 0) == 0) return alg.basis_element(indexed("basis:", alg.dim()));
  if (text.rfind("a0:", 0) == 0) return alg.a0_element(indexed("a0:", alg.a0_dim()));

  const bool inline_json = !text.empty() && (text.front() == '{' || text.front() == '[');
  const json j = inline_json ? parse_json_text(text, "element") : read_json_file(text);
  if (j.is_object() && j.contains("coeffs")) {
    const Vector c = parse_complex_vector(j["coeffs"], "element.coeffs");
    if (c.size() != alg.dim()) fail("element.coeffs", "expected " + std::to_string(alg.dim()) + " coefficients");
    return alg.element(c);
  }
  const json& mj = j.is_object() ? require(j, "matrix", "element") : j;
  const Matrix m = parse_matrix(mj, alg.n(), alg.n(), "element.matrix");
  const auto [coeffs, residual] = alg.project(m);
  if (residual > alg.tolerances().membership) fail("element", "matrix does not lie in A");
  return alg.element(coeffs);
}

std::string dump(const json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

json to_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

json real_to_json(const RealVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Element& e) { return {{"coeffs", to_json(e.coeffs)}, {"matrix", to_json(e.matrix)}}; }

json to_json(const ValidationReport& r) {
  json axioms = json::array();
  for (const auto& a : r.axioms) {
    json x = {{"name", a.name}, {"max_residual", a.max_residual}, {"passed", a.passed}};
    if (a.worst_pair) x["worst_pair"] = {a.worst_pair->first, a.worst_pair->second};
    axioms.push_back(x);
  }
  json out = {{"axioms", axioms}, {"usable", r.usable}};
  if (r.violation) {
    json v = {{"kind", to_string(r.violation->kind)}, {"axiom", r.violation->axiom},
              {"residual", r.violation->residual}};
    if (r.violation->pair) v["pair"] = {r.violation->pair->first, r.violation->pair->second};
    out["violation"] = v;
  }
  return out;
}

json to_json(const FormReport& r) {
  return {{"label", r.label},
          {"min_eigenvalue", r.min_eigenvalue},
          {"max_eigenvalue", r.max_eigenvalue},
          {"positivity_margin", r.positivity_margin},
          {"hermitian_residual", r.hermitian_residual},
          {"positive", r.positive},
          {"invariance_residual", r.invariance_residual},
          {"invariant", r.invariant},
          {"rank_a0", r.rank_a0},
          {"rank_a", r.rank_a},
          {"dense", r.dense},
          {"accepted", r.accepted}};
}

json to_json(const GnsRep& rep, const GnsCheck& c) {
  return {{"label", rep.label},
          {"dim_h", rep.dim_h},
          {"cyclic_vector", to_json(rep.cyclic)},
          {"solve_residual", rep.solve_residual},
          {"reconstruction_residual", c.reconstruction},
          {"star_residual", c.star},
          {"homomorphism_residual", c.homomorphism},
          {"module_residual", c.module},
          {"cyclic_rank", c.cyclic_rank},
          {"cyclic", c.cyclic},
          {"passed", c.passed},
          {"closure_note", c.closure_note}};
}

json to_json(const SufficiencyReport& r) {
  json samples = json::array();
  for (const auto& s : r.equivalence_samples) {
    samples.push_back({{"cond_i", s.cond_i},
                       {"cond_ii", s.cond_ii},
                       {"cond_iii", s.cond_iii},
                       {"cond_iv", s.cond_iv},
                       {"zero", {s.zero_i, s.zero_ii, s.zero_iii, s.zero_iv}},
                       {"consistent", s.consistent}});
  }
  return {{"sufficient", r.sufficient},
          {"balanced", r.balanced},
          {"twist_depth", r.twist_depth},
          {"family_size", r.family_size},
          {"null_dim", r.null_dim},
          {"witness", opt_element(r.witness)},
          {"witness_max_value", r.witness_max_value},
          {"witness_max_generator_value", r.witness_max_generator_value},
          {"vanishing_conditions", samples},
          {"vanishing_conditions_agree", r.equivalence_holds}};
}

json to_json(const ConeReport& r) {
  json out = {{"member", r.member},
              {"min_eigenvalues", r.min_eigenvalues},
              {"margins", r.margins},
              {"hermitian_residuals", r.hermitian_residuals},
              {"witness", nullptr}};
  if (r.witness) {
    out["witness"] = {{"generator", r.witness->generator},
                      {"x_a0_coords", to_json(r.witness->x_coords)},
                      {"x", to_json(r.witness->x)},
                      {"phi_ax_x", to_json(r.witness->value)},
                      {"hermitian_failure", r.witness->hermitian_failure}};
  }
  return out;
}

json to_json(const BoundednessReport& r) {
  return {{"bounded", r.bounded},
          {"norm", r.norm},
          {"routes",
           {{"forms_sup", r.norm_forms},
            {"gns_operator_norm", r.norm_reps},
            {"strong_sqrt_gamma_prime", std::sqrt(r.gamma_prime)},
            {"order_dilation", r.norm_order}}},
          {"gamma", r.gamma},
          {"gamma_prime", r.gamma_prime},
          {"gamma_second", r.gamma_second},
          {"gamma_re", r.gamma_re},
          {"gamma_im", r.gamma_im},
          {"verdicts", r.verdicts},
          {"max_route_disagreement", r.max_route_disagreement},
          {"order_chain_holds", r.chain_ok},
          {"null_leak", r.null_leak},
          {"member_norms", r.member_norms}};
}

json to_json(const WeakProductResult& r) {
  return {{"product", to_json(r.product)},
          {"relative_residual", r.relative_residual},
          {"rank", r.rank},
          {"unknowns", r.unknowns}};
}

json to_json(const ConditionCReport& r) {
  json fails = json::array();
  for (const auto& f : r.failures)
    fails.push_back({{"pair", {f.first, f.second}}, {"residual", f.residual}, {"unique", f.unique}});
  return {{"pairs_checked", r.pairs_checked},
          {"failures", fails},
          {"max_residual", r.max_residual},
          {"passed", r.passed},
          {"quantifier", r.quantifier}};
}

json to_json(const RadicalReport& r) {
  return {{"dim", r.dim},
          {"basis", to_json(r.basis)},
          {"operator_kernel_dim", r.operator_kernel_dim},
          {"cyclic_kernel_dim", r.cyclic_kernel_dim},
          {"matches", r.matches},
          {"compared_with", r.comparison}};
}

json to_json(const BoundedAlgebraReport& r) {
  json cs = json::array();
  for (const auto& s : r.cstar)
    cs.push_back({{"probe", s.probe}, {"norm_sq", s.norm_sq}, {"product_norm", s.product_norm},
                  {"rel_error", s.rel_error}});
  return {{"basis_norms", r.basis_norms},
          {"all_bounded", r.all_bounded},
          {"max_adjoint_defect", r.max_adjoint_defect},
          {"max_triangle_excess", r.max_triangle_excess},
          {"max_submultiplicativity_excess", r.max_submult_excess},
          {"products_resolved", r.products_resolved},
          {"cstar_samples", cs},
          {"max_cstar_error", r.max_cstar_error},
          {"normed_star_algebra", r.normed_star_algebra},
          {"cstar_identity", r.cstar_identity},
          {"completeness", r.completeness_note}};
}

json to_json(const GAStarReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"value", c.value}});
  return {{"checks", checks},
          {"witness", opt_element(r.witness)},
          {"error", r.error ? json(*r.error) : json(nullptr)},
          {"all_passed", r.all_passed},
          {"wb4_note", r.wb4_note}};
}

json to_json(const ComparisonReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"seminorm", e.name},
                       {"gamma", e.gamma},
                       {"witness_probe", e.witness ? json(*e.witness) : json(nullptr)},
                       {"degenerate_probes", e.degenerate}});
  return {{"entries", entries}, {"note", r.note}};
}

json to_json(const SeminormLawReport& r) {
  return {{"probes", r.probes},
          {"gamma_F", r.gamma_F},
          {"max_homogeneity_defect", r.max_homogeneity_defect},
          {"max_triangle_excess", r.max_triangle_excess},
          {"max_ordering_excess", r.max_ordering_excess},
          {"max_lower_adjoint_defect", r.max_lower_adjoint_defect},
          {"max_twist_defect", r.max_twist_defect},
          {"cstar_samples", r.cstar_samples},
          {"max_cstar_defect", r.max_cstar_defect},
          {"radical_coherent", r.radical_coherent},
          {"left_mult_bounds", r.left_mult_bounds},
          {"comparison", to_json(r.comparison)},
          {"passed", r.passed}};
}

json to_json(const HolderResult& r) {
  return {{"value", r.value}, {"w_star", real_to_json(r.w_star)}, {"norm_p_squared", r.norm_p_sq},
          {"relative_gap", r.rel_gap}};
}

json to_json(const LpNormResult& r) {
  return {{"sup_norm", r.value}, {"generic_bounded_norm", r.generic}, {"relative_difference", r.rel_diff}};
}

} // namespace qstar::io
