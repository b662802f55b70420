#pragma once

#include <span>
#include <utility>
#include <vector>

#include "jmech/expr.hpp"
#include "jmech/system.hpp"

namespace jmech {

/// Vertical prolongation  sum_k ( qd_k d/dq_k + pd_k d/dp_k ) e.
/// Throws DomainError when e already contains dotted coordinates.
Expr vertical_prolong(const Expr& e);

/// Second vertical prolongation
///   sum_k ( qd_k d/dq_k + pd_k d/dp_k + qdd_k d/dqd_k + pdd_k d/dpd_k ) e.
/// Throws DomainError when e contains double-dotted coordinates.
Expr vertical_prolong2(const Expr& e);

/// Jacobi-field and linear-deviation parts of the twice-prolonged Hamiltonian.
struct SecondOrderSplit {
  /// sum_k ( qdd_k dH/dq_k + pdd_k dH/dp_k )
  Expr jacobi;
  /// (1/2) (Q d/dq + P d/dp)^2 H with Q = sqrt(2) qd, P = sqrt(2) pd, stored
  /// in the qd/pd coordinates: (qd d/dq + pd d/dp)^2 H.
  Expr deviation;
};

SecondOrderSplit split_h1_h2(const HamiltonianSystem& system);

/// Rewrites e in the canonical deviation coordinates Q = sqrt(2) qd,
/// P = sqrt(2) pd; the result uses the qd/pd slots to hold Q/P.
Expr in_deviation_coordinates(const Expr& e);

/// A time-dependent affine change of fiber coordinates q' = L(t) q + c(t).
/// The momenta transform as p' = L^{-T} p.
class FrameChange {
 public:
  /// `forward[j]` is q'^{j+1}(t, q). Parameters are bound immediately.
  FrameChange(int dim, std::vector<Expr> forward, const ParamMap& params = {});

  int dim() const noexcept { return dim_; }
  const std::vector<Expr>& forward() const noexcept { return forward_; }

  /// Entry (j, k) of L(t) = d q'^j / d q^k, row-major.
  const Expr& linear(int j, int k) const;
  const Expr& offset(int j) const { return offset_.at(static_cast<std::size_t>(j)); }

  /// det L(t); symbolic when it normalizes to a constant, otherwise
  /// the common value found by sampling.
  double determinant() const noexcept { return det_; }

  /// Throws DomainError when det L(t) vanishes at any of `times`.
  void check_invertible(std::span<const double> times) const;

  /// The inverse map q = L^{-1}(t) (q' - c(t)).
  FrameChange inverse() const;

  /// Old coordinates in terms of new ones: q^k(t, q') and p_k(p').
  std::vector<Expr> old_positions() const;
  std::vector<Expr> old_momenta() const;

 private:
  int dim_;
  std::vector<Expr> forward_;
  std::vector<Expr> linear_;
  std::vector<Expr> offset_;
  std::vector<Expr> inverse_linear_;
  double det_ = 0.0;
};

/// H'(t, q', p') = H(t, q, p) + sum_j p'_j d_t q'^j(t, q), expressed in the
/// primed coordinates (which reuse the q/p names).
HamiltonianSystem frame_transform(const HamiltonianSystem& system, const FrameChange& change);

}  // namespace jmech
