// qstar: command-line driver for the finite quasi *-algebra checks.
//
// Exit codes: 0 every executed check passed, 2 some check failed, 3 input error.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qstar/io.hpp"
#include "qstar/linalg.hpp"
#include "qstar/lp_model.hpp"
#include "qstar/probes.hpp"
#include "qstar/topology.hpp"

using namespace qstar;
using io::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Config {
  std::string command;
  std::string instance_path;
  std::string family_path;
  std::string lp_path;
  std::vector<std::string> elements;
  Tolerances tol;
  std::uint64_t seed = kDefaultSeed;
  int probes = kDefaultRandomProbes;
  std::optional<int> twist_depth;
  std::string format = "text";
  bool timings = false;
};

struct Check {
  std::string label;
  bool passed = false;
  std::string summary;
  json data;
  double wall_ms = 0.0;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string cnum(cplx z) {
  if (z.imag() == 0.0) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? " - " : " + ") + num(std::abs(z.imag())) + "i";
}

std::string vec_text(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + cnum(v(i));
  return s + ")";
}

std::string mat_text(const Matrix& m) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    s += r ? "; " : "";
    for (Eigen::Index c = 0; c < m.cols(); ++c) s += (c ? ", " : "") + cnum(m(r, c));
  }
  return s + "]";
}

class Runner {
public:
  explicit Runner(Config cfg) : cfg_(std::move(cfg)) {}

  int run() {
    load_inputs();
    const std::string& c = cfg_.command;
    if (c == "validate" || c == "all") cmd_validate();
    if (alg_) {
      if (c == "forms" || c == "all") cmd_forms();
      if (c == "gns" || c == "all") cmd_gns();
      if (c == "cone") cmd_cone();
      if (c == "norm") cmd_norm();
      if (c == "weakprod") cmd_weakprod();
      if (c == "radical" || c == "all") cmd_radical();
      if (c == "topology" || c == "all") cmd_topology();
      if (c == "gastar" || c == "all") cmd_gastar();
    } else if (c != "validate" && c != "lp") {
      cmd_validate();
    }
    if (c == "lp" || (c == "all" && !cfg_.lp_path.empty())) cmd_lp();
    return emit();
  }

private:
  Config cfg_;
  std::optional<QuasiAlgebraInstance> instance_;
  std::optional<QuasiAlgebra> alg_;
  std::optional<FormFamily> family_;
  std::optional<FamilyContext> ctx_;
  std::optional<Error> ctx_error_;
  std::vector<Element> elements_;
  std::vector<Element> probes_;
  std::vector<Check> checks_;

  bool needs_instance() const { return cfg_.command != "lp"; }
  bool needs_family() const { return cfg_.command != "lp" && cfg_.command != "validate"; }

  void load_inputs() {
    if (needs_instance()) {
      if (cfg_.instance_path.empty()) throw InputError("--instance is required for '" + cfg_.command + "'");
      instance_ = io::parse_instance(io::read_json_file(cfg_.instance_path));
      const ValidationReport vr = validate_structure(*instance_, cfg_.tol);
      if (vr.usable) alg_.emplace(*instance_, cfg_.tol);
    }
    if (needs_family()) {
      if (cfg_.family_path.empty()) throw InputError("--family is required for '" + cfg_.command + "'");
      const int d = static_cast<int>(instance_->a_basis.size());
      family_ = io::parse_family(io::read_json_file(cfg_.family_path), instance_->n, d);
      if (cfg_.twist_depth) family_->twist_depth = *cfg_.twist_depth;
    }
    if (cfg_.command == "lp" && cfg_.lp_path.empty()) throw InputError("--lp is required for 'lp'");
    if (alg_) {
      for (const auto& text : cfg_.elements) elements_.push_back(io::parse_element(*alg_, text));
      probes_ = standard_probes(*alg_, cfg_.probes, cfg_.seed);
      if (family_) {
        try {
          ctx_.emplace(*alg_, *family_);
        } catch (const Error& e) {
          ctx_error_ = e;
        }
      }
    }
  }

  void add(const std::string& label, const std::function<void(Check&)>& body) {
    Check c;
    c.label = label;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(c);
    } catch (const Error& e) {
      c.passed = false;
      c.summary = std::string(e.what());
      c.data = {{"error", to_string(e.kind())}, {"message", e.what()}};
    }
    c.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    checks_.push_back(std::move(c));
  }

  const FamilyContext& ctx() const {
    if (!ctx_) {
      if (ctx_error_) throw *ctx_error_;
      throw Error(ErrorKind::InvalidArgument, "family unavailable");
    }
    return *ctx_;
  }

  void cmd_validate() {
    add("quasi *-algebra axioms", [&](Check& c) {
      const ValidationReport vr = validate_structure(*instance_, cfg_.tol);
      c.passed = vr.usable;
      c.data = io::to_json(vr);
      if (vr.usable) {
        c.summary = std::to_string(vr.axioms.size()) + " axioms hold; dim A = " +
                    std::to_string(instance_->a_basis.size()) + ", dim A0 = " +
                    std::to_string(instance_->a0_indices.size());
      } else {
        c.summary = std::string(to_string(vr.violation->kind)) + " at '" + vr.violation->axiom + "', residual " +
                    num(vr.violation->residual);
      }
    });
  }

  void cmd_forms() {
    for (size_t i = 0; i < family_->generators.size(); ++i) {
      const IpsForm& phi = family_->generators[i];
      add("ips-form validation: " + (phi.label.empty() ? "generator " + std::to_string(i) : phi.label), [&](Check& c) {
        FormReport fr = validate_ips_form(*alg_, phi);
        c.passed = fr.accepted;
        c.data = io::to_json(fr);
        c.summary = "positivity margin " + num(fr.positivity_margin) + ", invariance residual " +
                    num(fr.invariance_residual) + ", rank lambda(A0) " + std::to_string(fr.rank_a0) +
                    " / rank lambda(A) " + std::to_string(fr.rank_a);
      });
    }
    add("sufficiency of the family", [&](Check& c) {
      const SufficiencyReport sr = check_sufficiency(*alg_, *family_);
      c.passed = sr.sufficient;
      c.data = io::to_json(sr);
      c.summary = "common null space dimension " + std::to_string(sr.null_dim) + " over " +
                  std::to_string(sr.family_size) + " forms";
      if (sr.witness) c.summary += "; witness coefficients " + vec_text(sr.witness->coeffs);
    });
    add("vanishing conditions i-iv agree", [&](Check& c) {
      const SufficiencyReport sr = check_sufficiency(*alg_, *family_);
      c.passed = sr.equivalence_holds;
      c.data = {{"samples", sr.equivalence_samples.size()}, {"agree", sr.equivalence_holds}};
      c.summary = std::to_string(sr.equivalence_samples.size()) + " sample elements";
    });
  }

  void cmd_gns() {
    for (size_t i = 0; i < family_->generators.size(); ++i) {
      const IpsForm& phi = family_->generators[i];
      add("GNS construction: " + (phi.label.empty() ? "generator " + std::to_string(i) : phi.label), [&](Check& c) {
        const GnsRep rep = build_gns(*alg_, phi);
        const GnsCheck gc = verify_gns(*alg_, rep);
        c.passed = gc.passed;
        c.data = io::to_json(rep, gc);
        c.summary = "dim H = " + std::to_string(rep.dim_h) + ", reconstruction residual " + num(gc.reconstruction) +
                    ", cyclic rank " + std::to_string(gc.cyclic_rank);
      });
    }
  }

  void cmd_cone() {
    add("cone membership a in K_M", [&](Check& c) {
      const ConeReport cr = cone_membership(ctx(), elements_.at(0));
      c.passed = cr.member;
      c.data = io::to_json(cr);
      if (cr.member) {
        c.summary = "Hermitian PSD for every generator";
      } else {
        const ConeWitness& w = *cr.witness;
        c.summary = std::string(w.hermitian_failure ? "non-real value" : "negative value") + " at generator " +
                    std::to_string(w.generator) + ": x = " + mat_text(w.x.matrix) + " (A0 coords " + vec_text(w.x_coords) + ")" +
                    ", phi(ax, x) = " + cnum(w.value);
      }
    });
  }

  void cmd_norm() {
    add("M-bounded norm, equivalent characterizations i-iv", [&](Check& c) {
      const BoundednessReport br = m_bounded_norm(ctx(), elements_.at(0));
      c.passed = br.bounded && br.chain_ok;
      c.data = io::to_json(br);
      c.summary = "||a||_b^M = " + num(br.norm) + "; routes agree within " + num(br.max_route_disagreement) +
                  "; gamma'' = " + num(br.gamma_second);
    });
  }

  void cmd_weakprod() {
    add("weak product a o b", [&](Check& c) {
      const WeakProductResult r = solve_weak_product(ctx(), elements_.at(0), elements_.at(1));
      c.data = io::to_json(r);
      if (r.rank < r.unknowns) {
        c.passed = false;
        c.data["status"] = to_string(ErrorKind::AmbiguousProduct);
        c.summary = "AmbiguousProduct: system rank " + std::to_string(r.rank) + " < " + std::to_string(r.unknowns);
      } else if (r.relative_residual > cfg_.tol.weak) {
        c.passed = false;
        c.data["status"] = to_string(ErrorKind::NotWellDefined);
        c.summary = "NotWellDefined: relative residual " + num(r.relative_residual);
      } else {
        c.passed = true;
        c.data["status"] = "resolved";
        c.summary = "a o b coefficients " + vec_text(r.product.coeffs) + ", residual " + num(r.relative_residual);
      }
    });
  }

  void cmd_radical() {
    add("radical against GNS kernels", [&](Check& c) {
      const RadicalReport r = radical(ctx());
      c.passed = r.matches;
      c.data = io::to_json(r);
      c.summary = "dim R = " + std::to_string(r.dim) + "; compared with " + r.comparison + " (dims: operator " +
                  std::to_string(r.operator_kernel_dim) + ", cyclic " + std::to_string(r.cyclic_kernel_dim) + ")";
    });
  }

  void cmd_topology() {
    add("seminorm laws and ordering p_F <= gamma_F p^F <= gamma_F p^F_*", [&](Check& c) {
      const SeminormLawReport r = seminorm_laws(ctx(), probes_);
      c.passed = r.passed;
      c.data = io::to_json(r);
      c.summary = std::to_string(r.probes) + " probes; gamma_F = " + num(r.gamma_F) + "; twist defect " +
                  num(r.max_twist_defect) + "; " + std::to_string(r.cstar_samples) + " p_F(a* o a) samples";
    });
  }

  void cmd_gastar() {
    add("well-behaved family wb1-wb4 and consequences (a)-(c)", [&](Check& c) {
      const GAStarReport r = ga_star_check(*alg_, *family_, probes_);
      c.passed = r.all_passed;
      c.data = io::to_json(r);
      std::string s;
      for (const auto& h : r.checks) s += (s.empty() ? "" : "; ") + h.name + (h.passed ? " ok" : " FAIL");
      if (r.witness) s += "; wb1 witness coefficients " + vec_text(r.witness->coeffs);
      c.summary = s;
    });
  }

  void cmd_lp() {
    const io::LpInput in = io::parse_lp(io::read_json_file(cfg_.lp_path));
    std::optional<LpModel> model;
    add("L^p model construction", [&](Check& c) {
      model = build_lp_instance(in.points, in.masses, in.p);
      c.passed = true;
      c.data = {{"k", model->lp.k}, {"p", model->lp.p},
                {"s", model->lp.s_infinite ? json("inf") : json(model->lp.s)}};
      c.summary = "k = " + std::to_string(model->lp.k) + ", p = " + num(model->lp.p) +
                  ", s = " + (model->lp.s_infinite ? std::string("inf") : num(model->lp.s));
    });
    if (!model) return;
    const HolderResult h = holder_sup(in.f, model->lp);
    add("Holder duality sup_w sum |f|^2 w m = ||f||_p^2", [&](Check& c) {
      c.passed = h.rel_gap <= cfg_.tol.weak;
      c.data = io::to_json(h);
      c.summary = "value " + num(h.value) + ", ||f||_p^2 " + num(h.norm_p_sq) + ", gap " + num(h.rel_gap);
    });
    add("ascent oracle does not exceed the analytic value", [&](Check& c) {
      const double oracle = holder_ascent_oracle(in.f, model->lp);
      c.passed = oracle <= h.value * (1.0 + 1e-8) + 1e-300;
      c.data = {{"oracle", oracle}, {"analytic", h.value}};
      c.summary = "oracle " + num(oracle) + " vs analytic " + num(h.value);
    });
    add("bounded norm is the sup norm", [&](Check& c) {
      const LpNormResult r = lp_bounded_norm(in.f, *model, in.weights);
      c.passed = true;
      c.data = io::to_json(r);
      c.summary = "||f||_inf = " + num(r.value) + ", generic " + num(r.generic);
    });
    add("weight unit ball seminorms", [&](Check& c) {
      const double up = lp_upper_seminorm(in.f, model->lp);
      const double lo = lp_lower_seminorm(in.f, model->lp);
      const double np = lp_norm(in.f, model->lp.masses, model->lp.p);
      const double nh = lp_norm(in.f, model->lp.masses, model->lp.p / 2.0);
      const bool nonneg = (in.f.imag().array() == 0.0).all() && (in.f.real().array() >= 0.0).all();
      c.passed = linalg::close(up, np, 1e-9) && lo <= nh * (1.0 + 1e-9) + 1e-300 &&
                 (!nonneg || linalg::close(lo, nh, 1e-9));
      c.data = {{"p_upper", up}, {"norm_p", np}, {"p_lower", lo}, {"norm_p_half", nh}, {"f_nonnegative", nonneg}};
      c.summary = "p^F = " + num(up) + " (||f||_p = " + num(np) + "), p_F = " + num(lo) + " (||f||_{p/2} = " +
                  num(nh) + ")";
    });
  }

  int emit() {
    bool ok = !checks_.empty();
    for (const auto& c : checks_) ok = ok && c.passed;
    const int code = ok ? 0 : 2;
    if (cfg_.format == "json") {
      json checks = json::array();
      for (const auto& c : checks_) {
        json e = {{"label", c.label}, {"passed", c.passed}, {"summary", c.summary}, {"data", c.data}};
        if (cfg_.timings) e["wall_ms"] = c.wall_ms;
        checks.push_back(e);
      }
      json tol = {{"psd", cfg_.tol.psd},          {"rank", cfg_.tol.rank},
                  {"membership", cfg_.tol.membership}, {"weak", cfg_.tol.weak},
                  {"cross_check", cfg_.tol.cross_check}, {"residual", cfg_.tol.residual}};
      json config = {{"command", cfg_.command},     {"instance", cfg_.instance_path},
                     {"family", cfg_.family_path},  {"lp", cfg_.lp_path},
                     {"elements", cfg_.elements},   {"tolerances", tol},
                     {"seed", cfg_.seed},           {"random_probes", cfg_.probes},
                     {"twist_depth", cfg_.twist_depth ? json(*cfg_.twist_depth) : json(nullptr)}};
      json report = {{"tool", "qstar"}, {"version", kVersion}, {"config", config},
                     {"checks", checks}, {"passed", ok}, {"exit_code", code}};
      std::cout << io::dump(report) << "\n";
    } else {
      std::cout << "qstar " << kVersion << "  command=" << cfg_.command << "  seed=" << cfg_.seed << "\n";
      for (const auto& c : checks_) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.label << ": " << c.summary;
        if (cfg_.timings) std::cout << "  (" << num(c.wall_ms) << " ms)";
        std::cout << "\n";
      }
      std::cout << "overall: " << (ok ? "PASS" : "FAIL") << " (exit " << code << ")\n";
    }
    return code;
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"qstar: checks for finite-dimensional quasi *-algebras, ips-forms and M-bounded elements"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Config cfg;
  app.add_option("--instance", cfg.instance_path, "instance JSON file");
  app.add_option("--family", cfg.family_path, "form family JSON file");
  app.add_option("--lp", cfg.lp_path, "L^p model JSON file");
  app.add_option("--tol-psd", cfg.tol.psd, "relative PSD tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-rank", cfg.tol.rank, "relative rank threshold")->check(CLI::PositiveNumber);
  app.add_option("--tol-mem", cfg.tol.membership, "membership tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-weak", cfg.tol.weak, "weak product residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-cross", cfg.tol.cross_check, "cross-check tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "probe seed");
  app.add_option("--probes", cfg.probes, "number of random probes")->check(CLI::NonNegativeNumber);
  app.add_option("--twist-depth", cfg.twist_depth, "override the family's twist depth")->check(CLI::NonNegativeNumber);
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--timings", cfg.timings, "include wall times (makes output non-deterministic)");

  std::vector<std::string> one(1), two(2);
  auto plain = [&](const char* name, const char* help) { app.add_subcommand(name, help); };
  plain("validate", "check the quasi *-algebra axioms");
  plain("forms", "validate the family's ips-forms and its sufficiency");
  plain("gns", "build and verify the GNS representation of each generator");
  app.add_subcommand("cone", "decide a in K_M")->add_option("element", one[0], "element")->required();
  app.add_subcommand("norm", "M-bounded norm through all characterizations")
      ->add_option("element", one[0], "element")
      ->required();
  auto* wp = app.add_subcommand("weakprod", "weak product a o b");
  wp->add_option("a", two[0], "left factor")->required();
  wp->add_option("b", two[1], "right factor")->required();
  plain("radical", "radical of the family and GNS kernels");
  plain("topology", "seminorm laws on the probe set");
  plain("gastar", "well-behavedness harness");
  plain("lp", "discrete L^p model (needs --lp)");
  plain("all", "validate, forms, gns, radical, topology, gastar (and lp with --lp)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  if (cfg.command == "cone" || cfg.command == "norm") cfg.elements = one;
  if (cfg.command == "weakprod") cfg.elements = two;

  try {
    Runner runner(cfg);
    return runner.run();
  } catch (const InputError& e) {
    std::cerr << "qstar: input error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "qstar: " << e.what() << "\n";
    return e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::InvalidArgument ? 3 : 2;
  }
}
