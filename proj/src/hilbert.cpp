#include "jmech/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "jmech/dynamics.hpp"
#include "jmech/error.hpp"
#include "jmech/symcalc.hpp"

namespace jmech {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kMinCapture = 1.0 - 1e-8;

void require_same(const HermiteBasis& a, const HermiteBasis& b) {
  if (!(a == b)) throw DomainError("operands live on different bases");
}

OperatorMatrix from_matrix(const HermiteBasis& basis, SparseOperator m) {
  m.makeCompressed();
  return {basis, std::move(m)};
}

std::vector<bool> clean_mask(const HermiteBasis& basis) {
  std::vector<bool> mask(static_cast<std::size_t>(basis.size()));
  for (Eigen::Index i = 0; i < basis.size(); ++i) mask[static_cast<std::size_t>(i)] = basis.is_clean(i);
  return mask;
}

// Per-axis vectors combined with axis 0 as the most significant digit.
Eigen::VectorXcd tensor(const std::vector<Eigen::VectorXcd>& factors) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Ones(1);
  for (const auto& f : factors) {
    Eigen::VectorXcd next(out.size() * f.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * f.size(), f.size()) = out(i) * f;
    out = std::move(next);
  }
  return out;
}

// exp(i s x) per axis, combined by tensor product; s = 0 axes stay identity.
OperatorMatrix multiplication_exponential(const HermiteBasis& basis, const std::vector<double>& phases) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(coordinate_matrix(basis.modes()));
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const int n = basis.modes();
  SparseOperator out(1, 1);
  out.insert(0, 0) = 1.0;
  for (double s : phases) {
    SparseOperator factor(n, n);
    if (s == 0.0) {
      factor.setIdentity();
    } else {
      const Eigen::VectorXcd diag = (kI * s * eig.eigenvalues().cast<Complex>()).array().exp();
      const Eigen::MatrixXcd dense = v.cast<Complex>() * diag.asDiagonal() * v.transpose().cast<Complex>();
      factor = dense.sparseView(1.0, 0.0);
    }
    SparseOperator next = Eigen::kroneckerProduct(out, factor);
    out = std::move(next);
  }
  return from_matrix(basis, std::move(out));
}

// exp(i s x) sampled at the quadrature nodes, one factor per axis.
Eigen::VectorXcd plane_wave(const Quadrature& rule, double s) {
  return (kI * s * rule.nodes.cast<Complex>()).array().exp();
}

// Per-axis phases of f_{a,b}: b/hbar on x axes, -a/hbar on y axes.
std::vector<double> eigenstate_phases(const HermiteBasis& basis, std::span<const double> a, std::span<const double> b) {
  const auto m = static_cast<std::size_t>(basis.dim());
  if (a.size() != m || b.size() != m) throw DomainError("eigenstate labels do not match the fiber dimension");
  std::vector<double> phases;
  for (std::size_t k = 0; k < m; ++k) phases.push_back(b[k] / basis.hbar());
  for (std::size_t k = 0; k < m; ++k) phases.push_back(-a[k] / basis.hbar());
  return phases;
}

// Axis phases of exp((i/hbar) sum_k amount_k rdot_col(k)) for rdot = (phidot, pidot) flow.
std::vector<double> weyl_phases(const HermiteBasis& basis, Shift which, std::span<const double> amount,
                                const Eigen::MatrixXd& flow) {
  const int m = basis.dim();
  if (amount.size() != static_cast<std::size_t>(m)) throw DomainError("shift does not match the fiber dimension");
  const double sign = which == Shift::a ? -1.0 : 1.0;
  const int column = which == Shift::a ? m : 0;
  std::vector<double> phases(static_cast<std::size_t>(2 * m), 0.0);
  for (int axis = 0; axis < 2 * m; ++axis) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += amount[static_cast<std::size_t>(k)] * flow(axis, column + k);
    phases[static_cast<std::size_t>(axis)] = sign * s / basis.hbar();
  }
  return phases;
}

OperatorMatrix combination(const HermiteBasis& basis, const std::vector<OperatorMatrix>& ops,
                           const Eigen::VectorXd& weights) {
  SparseOperator out(basis.size(), basis.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const double w = weights(static_cast<Eigen::Index>(i));
    if (w != 0.0) out += Complex(w) * ops[i].matrix;
  }
  return from_matrix(basis, std::move(out));
}

InstantOperators from_flow(const HermiteBasis& basis, const Generators& g, const AffineFlow& flow) {
  const int m = basis.dim();
  std::vector<OperatorMatrix> position(g.phi);
  position.insert(position.end(), g.pi.begin(), g.pi.end());
  std::vector<OperatorMatrix> velocity(g.phidot);
  velocity.insert(velocity.end(), g.pidot.begin(), g.pidot.end());
  InstantOperators out;
  out.t = flow.t;
  for (int k = 0; k < 2 * m; ++k) {
    OperatorMatrix r = combination(basis, position, flow.linear.col(k));
    if (flow.offset(k) != 0.0) r = r + Complex(flow.offset(k)) * g.id;
    out.r.push_back(std::move(r));
    out.rdot.push_back(combination(basis, velocity, flow.linear.col(k)));
  }
  return out;
}

std::vector<std::string> instant_names(int m) {
  std::vector<std::string> names;
  for (const char* prefix : {"q", "p", "qdot", "pdot"}) {
    for (int k = 1; k <= m; ++k) names.push_back(std::string(prefix) + std::to_string(k) + "(t)");
  }
  return names;
}

void require_quadratic(const HamiltonianSystem& system, const HermiteBasis& basis) {
  if (!system.is_quadratic()) throw DomainError("instant operators need a Hamiltonian of degree at most two");
  if (system.dim() != basis.dim()) throw DomainError("system and basis dimensions differ");
}

nlohmann::json complex_rows(const Eigen::MatrixXcd& m, bool imaginary) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imaginary ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

HermiteBasis::HermiteBasis(int modes, int dim, double hbar) : modes_(modes), dim_(dim), hbar_(hbar), size_(1) {
  if (modes_ < 4) throw DomainError("at least 4 modes per axis are required");
  if (dim_ != 1 && dim_ != 2) throw DomainError("fiber dimension must be 1 or 2");
  if (!(hbar_ > 0) || !std::isfinite(hbar_)) throw DomainError("hbar must be positive");
  if (dim_ == 2 && modes_ > 16) throw DomainError("fiber dimension 2 supports at most 16 modes per axis");
  for (int a = 0; a < axes(); ++a) size_ *= modes_;
}

bool HermiteBasis::is_clean(Eigen::Index flat) const {
  for (int a = 0; a < axes(); ++a) {
    if (flat % modes_ > modes_ - 2) return false;
    flat /= modes_;
  }
  return true;
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same(a.basis, b.basis);
  return from_matrix(a.basis, a.matrix + b.matrix);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same(a.basis, b.basis);
  return from_matrix(a.basis, a.matrix - b.matrix);
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same(a.basis, b.basis);
  return from_matrix(a.basis, a.matrix * b.matrix);
}

OperatorMatrix operator*(Complex s, const OperatorMatrix& a) { return from_matrix(a.basis, s * a.matrix); }

StateVector operator*(const OperatorMatrix& a, const StateVector& v) {
  require_same(a.basis, v.basis);
  return {a.basis, a.matrix * v.coefficients, v.captured};
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same(a.basis, b.basis);
  return from_matrix(a.basis, a.matrix * b.matrix - b.matrix * a.matrix);
}

OperatorMatrix adjoint(const OperatorMatrix& a) { return from_matrix(a.basis, SparseOperator(a.matrix.adjoint())); }

OperatorMatrix identity(const HermiteBasis& basis) {
  SparseOperator id(basis.size(), basis.size());
  id.setIdentity();
  return from_matrix(basis, std::move(id));
}

double clean_deviation(const OperatorMatrix& a, Complex expected) {
  const auto clean = clean_mask(a.basis);
  std::vector<bool> diagonal_seen(clean.size(), false);
  double worst = 0.0;
  for (Eigen::Index col = 0; col < a.matrix.outerSize(); ++col) {
    if (!clean[static_cast<std::size_t>(col)]) continue;
    for (SparseOperator::InnerIterator it(a.matrix, col); it; ++it) {
      if (!clean[static_cast<std::size_t>(it.row())]) continue;
      const bool diagonal = it.row() == col;
      if (diagonal) diagonal_seen[static_cast<std::size_t>(col)] = true;
      worst = std::max(worst, std::abs(it.value() - (diagonal ? expected : Complex{})));
    }
  }
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (clean[i] && !diagonal_seen[i]) worst = std::max(worst, std::abs(expected));
  }
  return worst;
}

Eigen::VectorXd hermite_values(int count, double x) {
  Eigen::VectorXd h(std::max(count, 1));
  h(0) = 1.0;
  if (count > 1) h(1) = std::sqrt(2.0) * x;
  for (int n = 1; n + 1 < count; ++n) {
    h(n + 1) = (x * h(n) - std::sqrt(n / 2.0) * h(n - 1)) / std::sqrt((n + 1) / 2.0);
  }
  return h.head(count);
}

Quadrature gauss_hermite(int count) {
  if (count < 1) throw DomainError("quadrature needs at least one node");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(coordinate_matrix(count), Eigen::EigenvaluesOnly);
  Quadrature rule{eig.eigenvalues(), Eigen::VectorXd(count)};
  for (int i = 0; i < count; ++i) {
    double& x = rule.nodes(i);
    for (int iter = 0; iter < 3; ++iter) {
      const Eigen::VectorXd h = hermite_values(count + 1, x);
      const double slope = std::sqrt(2.0 * count) * h(count - 1);
      if (slope != 0.0) x -= h(count) / slope;
    }
    rule.weights(i) = 1.0 / hermite_values(count, x).squaredNorm();
  }
  return rule;
}

double gram_defect(const HermiteBasis& basis) {
  const int n = basis.modes();
  const Quadrature rule = gauss_hermite(2 * n);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    const Eigen::VectorXd h = hermite_values(n, rule.nodes(i));
    gram += rule.weights(i) * h * h.transpose();
  }
  return (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd coordinate_matrix(int modes) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(modes, modes);
  for (int n = 1; n < modes; ++n) x(n - 1, n) = x(n, n - 1) = std::sqrt(n / 2.0);
  return x;
}

Eigen::MatrixXd derivative_matrix(int modes) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(modes, modes);
  for (int n = 1; n < modes; ++n) d(n - 1, n) = std::sqrt(2.0 * n);
  return d;
}

OperatorMatrix on_axis(const HermiteBasis& basis, int axis, const Eigen::MatrixXcd& factor) {
  if (axis < 0 || axis >= basis.axes()) throw DomainError("axis out of range");
  const int n = basis.modes();
  SparseOperator id(n, n);
  id.setIdentity();
  SparseOperator out(1, 1);
  out.insert(0, 0) = 1.0;
  for (int a = 0; a < basis.axes(); ++a) {
    SparseOperator next = a == axis ? SparseOperator(Eigen::kroneckerProduct(out, SparseOperator(factor.sparseView())))
                                    : SparseOperator(Eigen::kroneckerProduct(out, id));
    out = std::move(next);
  }
  return from_matrix(basis, std::move(out));
}

Generators build_generators(const HermiteBasis& basis) {
  const int m = basis.dim();
  const Eigen::MatrixXcd x = coordinate_matrix(basis.modes()).cast<Complex>();
  const Eigen::MatrixXcd d = derivative_matrix(basis.modes()).cast<Complex>();
  const double hbar = basis.hbar();
  Generators g{{}, {}, {}, {}, identity(basis)};
  for (int k = 0; k < m; ++k) {
    g.phi.push_back(on_axis(basis, m + k, kI * hbar * d));
    g.pi.push_back(on_axis(basis, k, -kI * hbar * d));
    g.phidot.push_back(on_axis(basis, k, x));
    g.pidot.push_back(on_axis(basis, m + k, x));
  }
  return g;
}

CommutatorReport table_check(const HermiteBasis& basis, const std::vector<OperatorMatrix>& r,
                             const std::vector<OperatorMatrix>& rdot, const std::vector<std::string>& names) {
  const auto m = static_cast<std::size_t>(basis.dim());
  if (r.size() != 2 * m || rdot.size() != 2 * m || names.size() != 4 * m) {
    throw DomainError("commutation table needs 4m operators");
  }
  std::vector<const OperatorMatrix*> ops;
  for (const auto& op : r) ops.push_back(&op);
  for (const auto& op : rdot) ops.push_back(&op);
  const OperatorMatrix id = identity(basis);
  ops.push_back(&id);
  std::vector<std::string> labels = names;
  labels.push_back("I");

  // 0..m-1 q, m..2m-1 p, 2m..3m-1 qdot, 3m..4m-1 pdot, 4m identity.
  const Complex ih = kI * basis.hbar();
  const auto expected = [&](std::size_t i, std::size_t j) -> Complex {
    const auto group = [&](std::size_t k) { return k / m; };
    const auto index = [&](std::size_t k) { return k % m; };
    if (i == 4 * m || j == 4 * m || index(i) != index(j)) return 0.0;
    if ((group(i) == 1 && group(j) == 2) || (group(i) == 3 && group(j) == 0)) return -ih;
    if ((group(i) == 2 && group(j) == 1) || (group(i) == 0 && group(j) == 3)) return ih;
    return 0.0;
  };

  CommutatorReport report;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = 0; j < ops.size(); ++j) {
      const Complex want = expected(i, j);
      const double dev = clean_deviation(commutator(*ops[i], *ops[j]), want);
      report.entries.push_back({labels[i], labels[j], want, dev});
      report.max_deviation = std::max(report.max_deviation, dev);
    }
  }
  return report;
}

CommutatorReport commutator_check(const HermiteBasis& basis) {
  Generators g = build_generators(basis);
  std::vector<OperatorMatrix> r(g.phi);
  r.insert(r.end(), g.pi.begin(), g.pi.end());
  std::vector<OperatorMatrix> rdot(g.phidot);
  rdot.insert(rdot.end(), g.pidot.begin(), g.pidot.end());
  std::vector<std::string> names;
  for (const char* prefix : {"phi", "pi", "phidot", "pidot"}) {
    for (int k = 1; k <= basis.dim(); ++k) names.push_back(std::string(prefix) + std::to_string(k));
  }
  return table_check(basis, r, rdot, names);
}

StateVector project_eigenstate(const HermiteBasis& basis, std::span<const double> a, std::span<const double> b) {
  const int n = basis.modes();
  const Quadrature rule = gauss_hermite(2 * n);
  Eigen::MatrixXd h(rule.nodes.size(), n);
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) h.row(i) = hermite_values(n, rule.nodes(i)).transpose();

  std::vector<Eigen::VectorXcd> factors;
  double captured = 1.0;
  for (double s : eigenstate_phases(basis, a, b)) {
    const Eigen::VectorXcd weighted = plane_wave(rule, s).cwiseProduct(rule.weights.cast<Complex>());
    Eigen::VectorXcd c = h.transpose().cast<Complex>() * weighted;
    captured *= c.squaredNorm();
    factors.push_back(std::move(c));
  }
  captured = std::min(captured, 1.0);
  if (!(captured >= kMinCapture)) {
    throw CaptureError("truncated basis captures only " + std::to_string(captured) +
                           " of the eigenstate norm; increase N",
                       captured);
  }
  return {basis, tensor(factors), captured};
}

OperatorMatrix weyl_operator(const HermiteBasis& basis, Shift which, std::span<const double> amount) {
  const Eigen::Index n2 = 2 * basis.dim();
  return multiplication_exponential(basis, weyl_phases(basis, which, amount, Eigen::MatrixXd::Identity(n2, n2)));
}

OperatorMatrix weyl_operator(const HamiltonianSystem& system, const HermiteBasis& basis, Shift which,
                             std::span<const double> amount, double t) {
  if (t == 0.0) return weyl_operator(basis, which, amount);
  require_quadratic(system, basis);
  const AffineFlow flow = affine_flow(system, t);
  return multiplication_exponential(basis, weyl_phases(basis, which, amount, flow.linear));
}

Complex weyl_function_overlap(const HermiteBasis& basis, std::span<const double> a, std::span<const double> b,
                              Shift which, std::span<const double> amount) {
  const Quadrature rule = gauss_hermite(2 * basis.modes());
  std::vector<double> shifted_a(a.begin(), a.end());
  std::vector<double> shifted_b(b.begin(), b.end());
  auto& moved = which == Shift::a ? shifted_a : shifted_b;
  if (amount.size() != moved.size()) throw DomainError("shift does not match the fiber dimension");
  for (std::size_t k = 0; k < moved.size(); ++k) moved[k] += amount[k];

  const Eigen::Index n2 = 2 * basis.dim();
  const auto source = eigenstate_phases(basis, a, b);
  const auto target = eigenstate_phases(basis, shifted_a, shifted_b);
  const auto shift = weyl_phases(basis, which, amount, Eigen::MatrixXd::Identity(n2, n2));
  const Eigen::VectorXcd w = rule.weights.cast<Complex>();
  Complex overlap = 1.0;
  double norm_image = 1.0;
  double norm_target = 1.0;
  for (std::size_t axis = 0; axis < source.size(); ++axis) {
    const Eigen::VectorXcd image = plane_wave(rule, shift[axis]).cwiseProduct(plane_wave(rule, source[axis]));
    const Eigen::VectorXcd want = plane_wave(rule, target[axis]);
    overlap *= (want.conjugate().cwiseProduct(image)).dot(w.conjugate());
    norm_image *= image.cwiseAbs2().dot(rule.weights);
    norm_target *= want.cwiseAbs2().dot(rule.weights);
  }
  return overlap / std::sqrt(norm_image * norm_target);
}

double cosine_similarity(const StateVector& u, const StateVector& w) {
  require_same(u.basis, w.basis);
  return std::abs(u.coefficients.dot(w.coefficients)) / (u.coefficients.norm() * w.coefficients.norm());
}

InstantOperators instant_operators(const HamiltonianSystem& system, const HermiteBasis& basis, double t, double dt) {
  require_quadratic(system, basis);
  return from_flow(basis, build_generators(basis), affine_flow(system, t, dt));
}

CommutatorReport instant_commutator_check(const HamiltonianSystem& system, const HermiteBasis& basis, double t) {
  const InstantOperators ops = instant_operators(system, basis, t);
  return table_check(basis, ops.r, ops.rdot, instant_names(basis.dim()));
}

OperatorMatrix quantize_vertical_hamiltonian(const HamiltonianSystem& system, const InstantOperators& ops) {
  if (ops.r.empty()) throw DomainError("no instant operators");
  const HermiteBasis& basis = ops.r.front().basis;
  const int m = basis.dim();
  const Expr hv = vertical_prolong(system.bound_hamiltonian());

  SparseOperator total(basis.size(), basis.size());
  const OperatorMatrix id = identity(basis);
  for (const auto& [mono, coefficient] : hv.terms()) {
    double scale = coefficient;
    std::vector<const OperatorMatrix*> factors;
    Monomial scalar_part;
    for (const auto& [atom, power] : mono) {
      const auto* c = std::get_if<Coord>(&atom);
      if (c == nullptr || c->kind == CoordKind::t) {
        scalar_part.emplace_back(atom, power);
        continue;
      }
      const auto k = static_cast<std::size_t>(c->index - 1);
      const OperatorMatrix* op = nullptr;
      switch (c->kind) {
        case CoordKind::q: op = &ops.r[k]; break;
        case CoordKind::p: op = &ops.r[static_cast<std::size_t>(m) + k]; break;
        case CoordKind::qd: op = &ops.rdot[k]; break;
        case CoordKind::pd: op = &ops.rdot[static_cast<std::size_t>(m) + k]; break;
        default: throw DomainError("unexpected coordinate " + to_string(*c));
      }
      factors.insert(factors.end(), power, op);
    }
    if (!scalar_part.empty()) {
      Valuation at;
      at.t = ops.t;
      scale *= evaluate(Expr::monomial(scalar_part, 1.0), at);
    }
    if (factors.size() > 4) throw DomainError("symmetric ordering is limited to products of four operators");
    if (factors.empty()) {
      total += Complex(scale) * id.matrix;
      continue;
    }
    std::sort(factors.begin(), factors.end());
    SparseOperator sum(basis.size(), basis.size());
    int orderings = 0;
    do {
      SparseOperator product = factors.front()->matrix;
      for (std::size_t i = 1; i < factors.size(); ++i) product = SparseOperator(product * factors[i]->matrix);
      sum += product;
      ++orderings;
    } while (std::next_permutation(factors.begin(), factors.end()));
    total += Complex(scale / orderings) * sum;
  }
  return from_matrix(basis, std::move(total));
}

EvolutionReport evolution_residual(const HamiltonianSystem& system, const HermiteBasis& basis, double t,
                                   double dt_fd) {
  require_quadratic(system, basis);
  if (!(dt_fd > 0)) throw DomainError("finite-difference step must be positive");
  const Generators g = build_generators(basis);
  const AffineFlow flow = affine_flow(system, t);
  const InstantOperators now = from_flow(basis, g, flow);
  const InstantOperators later = from_flow(basis, g, extend_affine_flow(system, flow, dt_fd));
  const InstantOperators earlier = from_flow(basis, g, extend_affine_flow(system, flow, -dt_fd));
  const OperatorMatrix hv = quantize_vertical_hamiltonian(system, now);

  EvolutionReport report;
  report.names = instant_names(basis.dim());
  const Complex scale = kI * basis.hbar() / (2.0 * dt_fd);
  const auto check = [&](const OperatorMatrix& x, const OperatorMatrix& plus, const OperatorMatrix& minus) {
    const double r = clean_deviation(scale * (plus - minus) - commutator(x, hv), 0.0);
    report.residuals.push_back(r);
    report.max_residual = std::max(report.max_residual, r);
  };
  for (std::size_t k = 0; k < now.r.size(); ++k) check(now.r[k], later.r[k], earlier.r[k]);
  for (std::size_t k = 0; k < now.rdot.size(); ++k) check(now.rdot[k], later.rdot[k], earlier.rdot[k]);
  return report;
}

double hermiticity_defect(const OperatorMatrix& op) {
  SparseOperator d = op.matrix - SparseOperator(op.matrix.adjoint());
  double worst = 0.0;
  for (Eigen::Index col = 0; col < d.outerSize(); ++col) {
    for (SparseOperator::InnerIterator it(d, col); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

nlohmann::json to_json(const HermiteBasis& basis) {
  return {{"N", basis.modes()}, {"m", basis.dim()}, {"hbar", basis.hbar()}};
}

nlohmann::json to_json(const OperatorMatrix& op) {
  const Eigen::MatrixXcd dense(op.matrix);
  return {{"basis", to_json(op.basis)}, {"re", complex_rows(dense, false)}, {"im", complex_rows(dense, true)}};
}

nlohmann::json to_json(const StateVector& v) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.coefficients.size(); ++i) {
    re.push_back(v.coefficients(i).real());
    im.push_back(v.coefficients(i).imag());
  }
  return {{"basis", to_json(v.basis)}, {"re", std::move(re)}, {"im", std::move(im)}, {"captured", v.captured}};
}

nlohmann::json to_json(const CommutatorReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"left", e.left},
                       {"right", e.right},
                       {"expected", {e.expected.real(), e.expected.imag()}},
                       {"deviation", e.deviation}});
  }
  return {{"max_deviation", report.max_deviation}, {"entries", std::move(entries)}};
}

nlohmann::json to_json(const EvolutionReport& report) {
  nlohmann::json residuals = nlohmann::json::object();
  for (std::size_t i = 0; i < report.names.size(); ++i) residuals[report.names[i]] = report.residuals[i];
  return {{"max_residual", report.max_residual}, {"residuals", std::move(residuals)}};
}

}  // namespace jmech
