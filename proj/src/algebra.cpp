#include "qstar/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qstar/linalg.hpp"

namespace qstar {

namespace {

Matrix vectorize_basis(const std::vector<Matrix>& basis, int n) {
  Matrix v(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(basis.size()));
  for (size_t i = 0; i < basis.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = linalg::vec(basis[i]);
  return v;
}

// Least-squares projection onto the column span of a vectorized basis.
struct SpanProjector {
  Matrix v;
  Eigen::ColPivHouseholderQR<Matrix> qr;
  int n = 0;

  SpanProjector(const Matrix& vectorized, int dim) : v(vectorized), qr(vectorized), n(dim) {}

  std::pair<Vector, double> operator()(const Matrix& m) const {
    const Vector target = linalg::vec(m);
    Vector c = qr.solve(target);
    const double norm = target.norm();
    const double res = norm == 0.0 ? 0.0 : (v * c - target).norm() / norm;
    return {c, res};
  }

  Matrix realize(const Vector& c) const { return linalg::unvec(v * c, n); }
};

struct AxiomAccumulator {
  AxiomCheck check;
  double tol;

  AxiomAccumulator(std::string name, double t) : tol(t) { check.name = std::move(name); }

  void add(double residual, int i, int j) {
    if (!check.worst_pair || residual > check.max_residual) {
      check.max_residual = residual;
      check.worst_pair = std::make_pair(i, j);
    }
    if (residual > tol) check.passed = false;
  }
};

double relative(const Matrix& lhs, const Matrix& rhs, double scale) {
  const double s = std::max({lhs.norm(), rhs.norm(), scale});
  return s == 0.0 ? 0.0 : (lhs - rhs).norm() / s;
}

} // namespace

Matrix matrix_unit(int n, int i, int j) {
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

ValidationReport validate_structure(const QuasiAlgebraInstance& inst, const Tolerances& tol) {
  ValidationReport report;
  const int n = inst.n;
  const int d = static_cast<int>(inst.a_basis.size());

  auto fail = [&](ErrorKind kind, std::string axiom, std::optional<std::pair<int, int>> pair,
                  double residual) {
    if (!report.violation) report.violation = StructureViolation{kind, std::move(axiom), pair, residual};
    report.usable = false;
  };

  // Shape preconditions.
  {
    AxiomCheck shape{"shape", 0.0, true, std::nullopt};
    std::set<int> seen;
    bool ok = n > 0 && d > 0;
    for (const auto& b : inst.a_basis) ok = ok && b.rows() == n && b.cols() == n;
    for (int k : inst.a0_indices) ok = ok && k >= 0 && k < d && seen.insert(k).second;
    ok = ok && inst.unit_index >= 0 && inst.unit_index < d && !inst.a0_indices.empty();
    shape.passed = ok;
    report.axioms.push_back(shape);
    if (!ok) {
      fail(ErrorKind::InvalidArgument, "shape", std::nullopt, 0.0);
      return report;
    }
  }

  const Matrix v = vectorize_basis(inst.a_basis, n);
  {
    const int rank = linalg::numerical_rank(v, tol.rank);
    AxiomCheck indep{"linear independence", static_cast<double>(d - rank), rank == d, std::nullopt};
    report.axioms.push_back(indep);
    if (rank != d) {
      fail(ErrorKind::DependentBasis, "linear independence", std::nullopt, static_cast<double>(d - rank));
      return report;
    }
  }

  {
    const Matrix& u = inst.a_basis[static_cast<size_t>(inst.unit_index)];
    const double res = (u - Matrix::Identity(n, n)).norm() / std::sqrt(static_cast<double>(n));
    const bool in_a0 = std::find(inst.a0_indices.begin(), inst.a0_indices.end(), inst.unit_index) !=
                       inst.a0_indices.end();
    AxiomCheck unit{"unit in A0", res, res <= tol.residual && in_a0, std::nullopt};
    report.axioms.push_back(unit);
    if (!unit.passed) {
      fail(ErrorKind::MissingUnit, "unit in A0", std::nullopt, res);
      return report;
    }
  }

  const SpanProjector proj_a(v, n);
  std::vector<Matrix> a0_basis;
  for (int k : inst.a0_indices) a0_basis.push_back(inst.a_basis[static_cast<size_t>(k)]);
  const SpanProjector proj_a0(vectorize_basis(a0_basis, n), n);
  const int d0 = static_cast<int>(a0_basis.size());
  const auto& basis = inst.a_basis;

  // Closure scans; realized projections are reused by the associativity checks.
  AxiomAccumulator a0_prod("A0 closed under product", tol.membership);
  AxiomAccumulator a0_inv("A0 closed under involution", tol.membership);
  AxiomAccumulator a_inv("involution", tol.membership);
  AxiomAccumulator left_mod("left module A0*A", tol.membership);
  AxiomAccumulator right_mod("right module A*A0", tol.membership);

  std::vector<Matrix> xy(static_cast<size_t>(d0 * d0));
  for (int j = 0; j < d0; ++j) {
    for (int k = 0; k < d0; ++k) {
      auto [c, res] = proj_a0(a0_basis[static_cast<size_t>(j)] * a0_basis[static_cast<size_t>(k)]);
      a0_prod.add(res, inst.a0_indices[static_cast<size_t>(j)], inst.a0_indices[static_cast<size_t>(k)]);
      xy[static_cast<size_t>(j * d0 + k)] = proj_a0.realize(c);
    }
    auto [c, res] = proj_a0(a0_basis[static_cast<size_t>(j)].adjoint());
    a0_inv.add(res, inst.a0_indices[static_cast<size_t>(j)], inst.a0_indices[static_cast<size_t>(j)]);
  }
  std::vector<Matrix> adj(static_cast<size_t>(d));
  std::vector<Matrix> ax(static_cast<size_t>(d * d0)), xa(static_cast<size_t>(d * d0));
  for (int i = 0; i < d; ++i) {
    auto [c, res] = proj_a(basis[static_cast<size_t>(i)].adjoint());
    a_inv.add(res, i, i);
    adj[static_cast<size_t>(i)] = proj_a.realize(c);
    for (int k = 0; k < d0; ++k) {
      const Matrix& x = a0_basis[static_cast<size_t>(k)];
      auto [cr, rr] = proj_a(basis[static_cast<size_t>(i)] * x);
      right_mod.add(rr, i, inst.a0_indices[static_cast<size_t>(k)]);
      ax[static_cast<size_t>(i * d0 + k)] = proj_a.realize(cr);
      auto [cl, rl] = proj_a(x * basis[static_cast<size_t>(i)]);
      left_mod.add(rl, inst.a0_indices[static_cast<size_t>(k)], i);
      xa[static_cast<size_t>(i * d0 + k)] = proj_a.realize(cl);
    }
  }

  AxiomAccumulator assoc1("(xa)y = x(ay)", tol.residual);
  AxiomAccumulator assoc2("a(xy) = (ax)y", tol.residual);
  AxiomAccumulator anti("(ax)* = x*a*", tol.residual);
  for (int i = 0; i < d; ++i) {
    const Matrix& a = basis[static_cast<size_t>(i)];
    for (int j = 0; j < d0; ++j) {
      const Matrix& x = a0_basis[static_cast<size_t>(j)];
      const int xj = inst.a0_indices[static_cast<size_t>(j)];
      const double sx = a.norm() * x.norm();
      anti.add(relative(ax[static_cast<size_t>(i * d0 + j)].adjoint(), x.adjoint() * adj[static_cast<size_t>(i)], sx),
               i, xj);
      for (int k = 0; k < d0; ++k) {
        const Matrix& y = a0_basis[static_cast<size_t>(k)];
        const double s = sx * y.norm();
        const Matrix lhs1 = xa[static_cast<size_t>(i * d0 + j)] * y;
        const Matrix rhs1 = x * ax[static_cast<size_t>(i * d0 + k)];
        assoc1.add(relative(lhs1, rhs1, s), i, xj);
        const Matrix lhs2 = a * xy[static_cast<size_t>(j * d0 + k)];
        const Matrix rhs2 = ax[static_cast<size_t>(i * d0 + j)] * y;
        assoc2.add(relative(lhs2, rhs2, s), i, xj);
      }
    }
  }

  report.usable = true;
  auto push = [&](const AxiomAccumulator& acc) {
    report.axioms.push_back(acc.check);
    if (!acc.check.passed)
      fail(ErrorKind::ClosureViolation, acc.check.name, acc.check.worst_pair, acc.check.max_residual);
  };
  push(a0_prod);
  push(a0_inv);
  push(a_inv);
  push(left_mod);
  push(right_mod);
  push(assoc1);
  push(assoc2);
  push(anti);
  return report;
}

QuasiAlgebra::QuasiAlgebra(QuasiAlgebraInstance instance, const Tolerances& tol)
    : instance_(std::move(instance)), tol_(tol) {
  report_ = validate_structure(instance_, tol_);
  if (!report_.usable) {
    const auto& v = *report_.violation;
    std::ostringstream msg;
    msg << "instance '" << instance_.label << "' fails '" << v.axiom << "'";
    if (v.pair) msg << " at basis pair (" << v.pair->first << ", " << v.pair->second << ")";
    msg << ", residual " << v.residual;
    throw Error(v.kind, msg.str());
  }
  const int d = dim();
  const int d0 = a0_dim();
  vectorized_ = vectorize_basis(instance_.a_basis, n());
  qr_.compute(vectorized_);

  adjoint_map_.resize(d, d);
  for (int i = 0; i < d; ++i) adjoint_map_.col(i) = project(basis_matrix(i).adjoint()).first;

  selector_ = Matrix::Zero(d, d0);
  for (int k = 0; k < d0; ++k) selector_(instance_.a0_indices[static_cast<size_t>(k)], k) = 1.0;

  right_.assign(static_cast<size_t>(d0), Matrix(d, d));
  left_.assign(static_cast<size_t>(d0), Matrix(d, d));
  for (int k = 0; k < d0; ++k) {
    const Matrix& x = basis_matrix(instance_.a0_indices[static_cast<size_t>(k)]);
    for (int i = 0; i < d; ++i) {
      right_[static_cast<size_t>(k)].col(i) = project(basis_matrix(i) * x).first;
      left_[static_cast<size_t>(k)].col(i) = project(x * basis_matrix(i)).first;
    }
  }
}

Element QuasiAlgebra::element(const Vector& coeffs) const {
  if (coeffs.size() != dim()) throw Error(ErrorKind::InvalidArgument, "coefficient vector has wrong length");
  return Element{coeffs, linalg::unvec(vectorized_ * coeffs, n())};
}

Element QuasiAlgebra::basis_element(int i) const {
  Vector c = Vector::Zero(dim());
  c(i) = 1.0;
  return Element{c, basis_matrix(i)};
}

Element QuasiAlgebra::a0_element(int k) const { return basis_element(instance_.a0_indices[static_cast<size_t>(k)]); }

Element QuasiAlgebra::zero() const { return Element{Vector::Zero(dim()), Matrix::Zero(n(), n())}; }

std::pair<Vector, double> QuasiAlgebra::project(const Matrix& m) const {
  const Vector target = linalg::vec(m);
  Vector c = qr_.solve(target);
  const double norm = target.norm();
  const double res = norm == 0.0 ? 0.0 : (vectorized_ * c - target).norm() / norm;
  return {c, res};
}

Element QuasiAlgebra::from_matrix(const Matrix& m) const {
  if (m.rows() != n() || m.cols() != n()) throw Error(ErrorKind::InvalidArgument, "matrix has wrong shape");
  auto [c, res] = project(m);
  if (res > tol_.membership) {
    std::ostringstream msg;
    msg << "matrix is not in span(A), relative residual " << res;
    throw Error(ErrorKind::ClosureViolation, msg.str());
  }
  return element(c);
}

std::pair<Vector, double> QuasiAlgebra::a0_coordinates(const Element& x) const {
  Vector y(a0_dim());
  for (int k = 0; k < a0_dim(); ++k) y(k) = x.coeffs(instance_.a0_indices[static_cast<size_t>(k)]);
  const double norm = x.matrix.norm();
  if (norm == 0.0) return {y, 0.0};
  const Matrix inside = linalg::unvec(vectorized_ * (selector_ * y), n());
  return {y, (x.matrix - inside).norm() / norm};
}

bool QuasiAlgebra::in_a0(const Element& x) const { return a0_coordinates(x).second <= tol_.membership; }

Element QuasiAlgebra::from_a0_coordinates(const Vector& y) const { return element(selector_ * y); }

Element QuasiAlgebra::adjoint(const Element& a) const {
  return Element{adjoint_map_ * a.coeffs.conjugate(), a.matrix.adjoint()};
}

Matrix QuasiAlgebra::right_mult_by(const Element& x) const {
  const auto [y, res] = a0_coordinates(x);
  if (res > tol_.membership) throw Error(ErrorKind::NotInA0, "right multiplier is not in A0");
  Matrix m = Matrix::Zero(dim(), dim());
  for (int k = 0; k < a0_dim(); ++k) m += y(k) * right_[static_cast<size_t>(k)];
  return m;
}

Matrix QuasiAlgebra::left_mult_by(const Element& x) const {
  const auto [y, res] = a0_coordinates(x);
  if (res > tol_.membership) throw Error(ErrorKind::NotInA0, "left multiplier is not in A0");
  Matrix m = Matrix::Zero(dim(), dim());
  for (int k = 0; k < a0_dim(); ++k) m += y(k) * left_[static_cast<size_t>(k)];
  return m;
}

Matrix QuasiAlgebra::right_orbit(const Element& a) const {
  Matrix t(dim(), a0_dim());
  for (int k = 0; k < a0_dim(); ++k) t.col(k) = right_[static_cast<size_t>(k)] * a.coeffs;
  return t;
}

std::pair<Element, Element> hermitian_parts(const QuasiAlgebra& alg, const Element& a) {
  const Element star = alg.adjoint(a);
  Element re = 0.5 * (a + star);
  Element im = cplx(0.0, -0.5) * (a - star); // (a - a*) / (2i)
  return {re, im};
}

Element module_product(const QuasiAlgebra& alg, const Element& x, const Element& a, Side side) {
  if (!alg.in_a0(x)) throw Error(ErrorKind::NotInA0, "module multiplier is not in A0");
  const Matrix product = side == Side::Left ? Matrix(x.matrix * a.matrix) : Matrix(a.matrix * x.matrix);
  return alg.from_matrix(product);
}

} // namespace qstar
