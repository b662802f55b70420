#include "jmech/symcalc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Dense>

#include "jmech/error.hpp"

namespace jmech {

namespace {

// qd d/dq + pd d/dp over every (q, p) coordinate present in e.
Expr vertical_derivation(const Expr& e) {
  Expr out;
  for (Coord c : coordinates(e)) {
    if (c.kind == CoordKind::q) out += Expr::coordinate(Coord::qd(c.index)) * diff(e, c);
    if (c.kind == CoordKind::p) out += Expr::coordinate(Coord::pd(c.index)) * diff(e, c);
  }
  return out;
}

using ExprMatrix = std::vector<std::vector<Expr>>;

Expr symbolic_determinant(const ExprMatrix& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  Expr det;
  for (std::size_t col = 0; col < n; ++col) {
    if (a[0][col].is_zero()) continue;
    ExprMatrix minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Expr> row;
      for (std::size_t c = 0; c < n; ++c) {
        if (c != col) row.push_back(a[r][c]);
      }
      minor.push_back(std::move(row));
    }
    Expr term = a[0][col] * symbolic_determinant(minor);
    if (col % 2 == 0) {
      det += term;
    } else {
      det -= term;
    }
  }
  return det;
}

Expr cofactor(const ExprMatrix& a, std::size_t row, std::size_t col) {
  const std::size_t n = a.size();
  if (n == 1) return Expr::constant(1.0);
  ExprMatrix minor;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == row) continue;
    std::vector<Expr> entries;
    for (std::size_t c = 0; c < n; ++c) {
      if (c != col) entries.push_back(a[r][c]);
    }
    minor.push_back(std::move(entries));
  }
  Expr d = symbolic_determinant(minor);
  return (row + col) % 2 == 0 ? d : -d;
}

double evaluate_at_time(const Expr& e, double t) {
  Valuation at;
  at.t = t;
  return evaluate(e, at);
}

}  // namespace

Expr vertical_prolong(const Expr& e) {
  for (Coord c : coordinates(e)) {
    if (c.kind != CoordKind::t && c.kind != CoordKind::q && c.kind != CoordKind::p) {
      throw DomainError("vertical prolongation expects a function of (t, q, p); found " + to_string(c));
    }
  }
  return vertical_derivation(e);
}

Expr vertical_prolong2(const Expr& e) {
  Expr out;
  for (Coord c : coordinates(e)) {
    switch (c.kind) {
      case CoordKind::qdd:
      case CoordKind::pdd:
        throw DomainError("second vertical prolongation expects no double-dotted coordinates; found " + to_string(c));
      case CoordKind::q: out += Expr::coordinate(Coord::qd(c.index)) * diff(e, c); break;
      case CoordKind::p: out += Expr::coordinate(Coord::pd(c.index)) * diff(e, c); break;
      case CoordKind::qd: out += Expr::coordinate(Coord::qdd(c.index)) * diff(e, c); break;
      case CoordKind::pd: out += Expr::coordinate(Coord::pdd(c.index)) * diff(e, c); break;
      case CoordKind::t: break;
    }
  }
  return out;
}

SecondOrderSplit split_h1_h2(const HamiltonianSystem& system) {
  const Expr& h = system.hamiltonian();
  SecondOrderSplit split;
  for (int k = 1; k <= system.dim(); ++k) {
    split.jacobi += Expr::coordinate(Coord::qdd(k)) * diff(h, Coord::q(k));
    split.jacobi += Expr::coordinate(Coord::pdd(k)) * diff(h, Coord::p(k));
  }
  split.deviation = vertical_derivation(vertical_derivation(h));
  return split;
}

Expr in_deviation_coordinates(const Expr& e) {
  // Each dotted factor contributes 2^(-1/2); powers of two stay exact.
  Expr out;
  for (const auto& [mono, coefficient] : e.terms()) {
    unsigned dotted = 0;
    for (const auto& [atom, power] : mono) {
      const auto* c = std::get_if<Coord>(&atom);
      if (c && (c->kind == CoordKind::qd || c->kind == CoordKind::pd)) dotted += power;
    }
    double scale = std::ldexp(1.0, -static_cast<int>(dotted / 2));
    if (dotted % 2 == 1) scale /= std::numbers::sqrt2;
    out += Expr::monomial(mono, coefficient * scale);
  }
  return out;
}

FrameChange::FrameChange(int dim, std::vector<Expr> forward, const ParamMap& params) : dim_(dim) {
  if (dim_ < 1) throw DomainError("dimension must be positive");
  if (forward.size() != static_cast<std::size_t>(dim_)) {
    throw DomainError("frame change needs one map per coordinate");
  }
  const auto n = static_cast<std::size_t>(dim_);
  for (auto& f : forward) {
    f = jmech::bind(f, params);
    for (const auto& name : parameters(f)) throw DomainError("parameter '" + name + "' is not bound");
    for (Coord c : coordinates(f)) {
      if (c.kind != CoordKind::t && c.kind != CoordKind::q) {
        throw DomainError("frame maps may depend on t and q only; found " + to_string(c));
      }
      if (c.kind == CoordKind::q && c.index > dim_) throw DomainError("coordinate " + to_string(c) + " out of range");
    }
  }
  forward_ = std::move(forward);

  std::map<Coord, Expr> zero_q;
  for (int k = 1; k <= dim_; ++k) zero_q[Coord::q(k)] = Expr();
  ExprMatrix l(n, std::vector<Expr>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      l[j][k] = diff(forward_[j], Coord::q(static_cast<int>(k) + 1));
      if (depends_on(l[j][k], CoordKind::q)) throw DomainError("frame change is not affine in q");
      linear_.push_back(l[j][k]);
    }
    offset_.push_back(substitute(forward_[j], zero_q));
  }

  const Expr det = symbolic_determinant(l);
  if (det.is_constant()) {
    det_ = det.constant_term();
  } else {
    // Time-dependent entries whose determinant is constant only up to
    // identities such as sin^2 + cos^2 = 1.
    static constexpr double kSampleTimes[] = {0.0, 0.37, 1.1, 2.9, 5.3, 7.7, 13.1, 21.9};
    det_ = evaluate_at_time(det, kSampleTimes[0]);
    for (double t : kSampleTimes) {
      const double d = evaluate_at_time(det, t);
      if (std::abs(d - det_) > 1e-12 * std::max(1.0, std::abs(det_))) {
        throw DomainError("frame changes with a time-dependent determinant are not supported");
      }
    }
  }
  if (std::abs(det_) < 1e-12) throw DomainError("linear part of the frame change is singular");

  inverse_linear_.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) inverse_linear_[k * n + j] = cofactor(l, j, k) * (1.0 / det_);
  }
}

const Expr& FrameChange::linear(int j, int k) const {
  return linear_.at(static_cast<std::size_t>(j * dim_ + k));
}

void FrameChange::check_invertible(std::span<const double> times) const {
  const auto n = static_cast<std::size_t>(dim_);
  for (double t : times) {
    Eigen::MatrixXd m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = evaluate_at_time(linear_[j * n + k], t);
      }
    }
    const double det = m.determinant();
    if (std::abs(det) < 1e-12) {
      throw DomainError("frame change is not invertible at t = " + to_string(Expr::constant(t)));
    }
  }
}

std::vector<Expr> FrameChange::old_positions() const {
  const auto n = static_cast<std::size_t>(dim_);
  std::vector<Expr> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      out[k] += inverse_linear_[k * n + j] * (Expr::coordinate(Coord::q(static_cast<int>(j) + 1)) - offset_[j]);
    }
  }
  return out;
}

std::vector<Expr> FrameChange::old_momenta() const {
  const auto n = static_cast<std::size_t>(dim_);
  std::vector<Expr> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      out[k] += linear_[j * n + k] * Expr::coordinate(Coord::p(static_cast<int>(j) + 1));
    }
  }
  return out;
}

FrameChange FrameChange::inverse() const { return FrameChange(dim_, old_positions()); }

HamiltonianSystem frame_transform(const HamiltonianSystem& system, const FrameChange& change) {
  if (system.dim() != change.dim()) throw DomainError("frame change dimension does not match the system");
  const auto positions = change.old_positions();
  const auto momenta = change.old_momenta();
  std::map<Coord, Expr> to_old_q;
  std::map<Coord, Expr> to_old;
  for (int k = 1; k <= system.dim(); ++k) {
    to_old_q[Coord::q(k)] = positions[static_cast<std::size_t>(k - 1)];
    to_old[Coord::q(k)] = positions[static_cast<std::size_t>(k - 1)];
    to_old[Coord::p(k)] = momenta[static_cast<std::size_t>(k - 1)];
  }
  Expr transformed = substitute(system.hamiltonian(), to_old);
  for (int j = 1; j <= system.dim(); ++j) {
    const Expr velocity = substitute(diff(change.forward()[static_cast<std::size_t>(j - 1)], Coord::time()), to_old_q);
    transformed += Expr::coordinate(Coord::p(j)) * velocity;
  }
  return HamiltonianSystem(system.dim(), std::move(transformed), system.params());
}

}  // namespace jmech
