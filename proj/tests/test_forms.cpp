#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "qstar/forms.hpp"
#include "qstar/probes.hpp"

using namespace qstar;
namespace fx = qstar::fixtures;

namespace {

Matrix outer(const Vector& v) { return v * v.adjoint(); }

Vector e(int n, int i) {
  Vector v = Vector::Zero(n);
  v(i) = 1.0;
  return v;
}

} // namespace

TEST_CASE("vector state values") {
  QuasiAlgebra alg(fx::full_matrix(2));
  const IpsForm phi = IpsForm::vector_state(fx::eye(2));
  CHECK(std::abs(form_eval(alg, phi, alg.unit(), alg.unit()) - 2.0) < 1e-15);
  const Element e12 = alg.from_matrix(matrix_unit(2, 0, 1));
  CHECK(std::abs(form_eval(alg, phi, e12, e12) - 1.0) < 1e-15);

  // Gram route against the trace formula
  std::mt19937_64 rng(5);
  const IpsForm psi = IpsForm::vector_state(fx::random_psd(2, 2, rng));
  const Matrix& s = std::get<VectorState>(psi.kind).weight;
  const IpsForm psi_g = IpsForm::gram(gram_matrix(alg, psi));
  const auto probes = random_elements(alg, 6, 9);
  for (const auto& a : probes)
    for (const auto& b : probes) {
      const cplx direct = (b.matrix.adjoint() * a.matrix * s).trace();
      CHECK(std::abs(form_eval(alg, psi_g, a, b) - direct) < 1e-12);
    }
}

TEST_CASE("Hermitian symmetry and Cauchy-Schwarz") {
  std::mt19937_64 rng(17);
  QuasiAlgebra alg(fx::blocks_over_diagonal(2, 2));
  const IpsForm phi = IpsForm::vector_state(fx::random_psd(4, 2, rng));
  const auto probes = random_elements(alg, 12, 4);
  for (const auto& a : probes)
    for (const auto& b : probes) {
      const cplx ab = form_eval(alg, phi, a, b), ba = form_eval(alg, phi, b, a);
      CHECK(std::abs(ab - std::conj(ba)) < 1e-12);
      const double aa = form_eval(alg, phi, a, a).real(), bb = form_eval(alg, phi, b, b).real();
      CHECK(std::norm(ab) <= aa * bb * (1.0 + 1e-12) + 1e-15);
    }
}

TEST_CASE("ips-form validation") {
  SUBCASE("xi xi* on M2 over diag is accepted") {
    QuasiAlgebra alg(fx::m2_diag());
    Vector xi(2);
    xi << 1.0, 1.0;
    const auto rep = validate_ips_form(alg, IpsForm::vector_state(outer(xi)));
    CHECK(rep.positive);
    CHECK(rep.invariant);
    CHECK(rep.rank_a0 == 2);
    CHECK(rep.rank_a == 2);
    CHECK(rep.dense);
    CHECK(rep.accepted);
  }
  SUBCASE("e1 e1* on M2 over diag is not dense") {
    QuasiAlgebra alg(fx::full_over_diagonal(2));
    const auto rep = validate_ips_form(alg, IpsForm::vector_state(outer(e(2, 0))));
    CHECK(rep.positive);
    CHECK(rep.invariant);
    CHECK(rep.rank_a0 == 1);
    CHECK(rep.rank_a == 2);
    CHECK_FALSE(rep.dense);
    CHECK_FALSE(rep.accepted);
  }
  SUBCASE("negative Gram is rejected") {
    QuasiAlgebra alg(fx::full_matrix(2));
    const auto rep = validate_ips_form(alg, IpsForm::gram(-Matrix::Identity(4, 4)));
    CHECK_FALSE(rep.positive);
    CHECK(rep.min_eigenvalue == doctest::Approx(-1.0));
    CHECK_FALSE(rep.accepted);
  }
  SUBCASE("a generic PSD Gram is not invariant") {
    std::mt19937_64 rng(2);
    QuasiAlgebra alg(fx::full_matrix(2));
    const auto rep = validate_ips_form(alg, IpsForm::gram(fx::random_psd(4, 4, rng)));
    CHECK(rep.positive);
    CHECK_FALSE(rep.invariant);
  }
}

TEST_CASE("twists") {
  std::mt19937_64 rng(23);
  QuasiAlgebra alg(fx::full_matrix(2));
  const IpsForm phi = IpsForm::vector_state(fx::random_psd(2, 2, rng));

  CHECK(forms_equal(alg, twist(alg, phi, alg.unit()), phi, 1e-14));

  const IpsForm id = IpsForm::vector_state(fx::eye(2));
  const Element e11 = alg.from_matrix(matrix_unit(2, 0, 0));
  CHECK(forms_equal(alg, twist(alg, id, e11), IpsForm::vector_state(matrix_unit(2, 0, 0)), 1e-14));

  // phi^x(a, b) = phi(ax, bx) pointwise, through the Gram route as well
  const auto probes = random_elements(alg, 4, 1);
  const Element x = probes[0], y = probes[1];
  const IpsForm phi_g = IpsForm::gram(gram_matrix(alg, phi));
  const IpsForm tx = twist(alg, phi_g, x);
  for (const auto& a : probes)
    for (const auto& b : probes) {
      const Element ax = alg.from_matrix(a.matrix * x.matrix), bx = alg.from_matrix(b.matrix * x.matrix);
      CHECK(std::abs(form_eval(alg, tx, a, b) - form_eval(alg, phi, ax, bx)) < 1e-12);
    }

  // twisting by x then by y is the twist by yx
  const IpsForm xy_then = twist(alg, twist(alg, phi, x), y);
  CHECK(forms_equal(alg, xy_then, twist(alg, phi, alg.from_matrix(y.matrix * x.matrix)), 1e-12));
  CHECK_FALSE(forms_equal(alg, xy_then, twist(alg, phi, alg.from_matrix(x.matrix * y.matrix)), 1e-6));

  QuasiAlgebra m2d(fx::m2_diag());
  try {
    twist(m2d, IpsForm::vector_state(fx::eye(2)), m2d.from_matrix(fx::sigma_x()));
    FAIL("expected NotInA0");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::NotInA0);
  }
}

TEST_CASE("balanced closure members") {
  QuasiAlgebra alg(fx::m2_diag());
  Vector xi(2);
  xi << 1.0, 1.0;
  FormFamily fam{{IpsForm::vector_state(outer(xi), "xi")}, true, 1, "m"};
  PreparedFamily pf(alg, fam);
  // the twist by the unit repeats the generator and is dropped
  REQUIRE(pf.members().size() == 2);
  CHECK(pf.members()[0].word.empty());
  CHECK(pf.members()[1].word == std::vector<int>{1});
  const Matrix want = gram_matrix(alg, IpsForm::vector_state(matrix_unit(2, 0, 0) * outer(xi) * matrix_unit(2, 0, 0)));
  CHECK(grams_equal(pf.members()[1].gram, want, 1e-14));

  fam.balanced = false;
  CHECK(PreparedFamily(alg, fam).members().size() == 1);
}

TEST_CASE("sufficiency") {
  QuasiAlgebra alg(fx::full_matrix(2));
  const IpsForm p1 = IpsForm::vector_state(outer(e(2, 0)), "e1");

  SUBCASE("balanced single vector state separates M2") {
    const auto rep = check_sufficiency(alg, FormFamily{{p1}, true, 1, {}});
    CHECK(rep.sufficient);
    CHECK(rep.null_dim == 0);
    CHECK_FALSE(rep.witness.has_value());
  }
  SUBCASE("unbalanced single vector state does not") {
    const auto rep = check_sufficiency(alg, FormFamily{{p1}, false, 1, {}});
    CHECK_FALSE(rep.sufficient);
    // {a : a e1 = 0}
    CHECK(rep.null_dim == 2);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->matrix.norm() == doctest::Approx(1.0));
    CHECK((rep.witness->matrix * e(2, 0)).norm() < 1e-12);
    CHECK(rep.witness_max_value <= 1e-10);
    CHECK(rep.equivalence_holds);
  }
  SUBCASE("trace form is sufficient without balancing") {
    const auto rep = check_sufficiency(alg, FormFamily{{IpsForm::vector_state(fx::eye(2))}, false, 1, {}});
    CHECK(rep.sufficient);
  }
  SUBCASE("empty family") {
    try {
      check_sufficiency(alg, FormFamily{});
      FAIL("expected EmptyFamily");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::EmptyFamily);
    }
  }
}

TEST_CASE("vanishing conditions agree") {
  QuasiAlgebra alg(fx::full_matrix(2));
  PreparedFamily fam(alg, FormFamily{{IpsForm::vector_state(outer(e(2, 0)))}, true, 1, {}});
  for (const auto& a : random_elements(alg, 5, 8)) {
    const auto v = vanishing_profile(fam, a);
    CHECK(v.consistent);
    CHECK_FALSE(v.zero_i);
  }
  const auto z = vanishing_profile(fam, alg.zero());
  CHECK(z.zero_i);
  CHECK(z.zero_iv);
  CHECK(z.consistent);
}

TEST_CASE("common null space") {
  Matrix g = Matrix::Zero(3, 3);
  g(0, 0) = 1.0;
  Matrix h = Matrix::Zero(3, 3);
  h(1, 1) = 4.0;
  const Matrix ns = common_null_space({g, h}, 3, 1e-10);
  REQUIRE(ns.cols() == 1);
  CHECK(std::abs(std::abs(ns(2, 0)) - 1.0) < 1e-14);
}
