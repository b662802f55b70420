#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "jmech/expr.hpp"

namespace jmech {

/// A Hamiltonian H(t, q, p) on an m-dimensional fiber together with its
/// parameter bindings. Gradients and Hessians of the parameter-bound
/// Hamiltonian are derived once at construction.
class HamiltonianSystem {
 public:
  HamiltonianSystem(int dim, Expr hamiltonian, ParamMap params = {});

  int dim() const noexcept { return dim_; }
  const Expr& hamiltonian() const noexcept { return hamiltonian_; }
  const ParamMap& params() const noexcept { return params_; }

  /// The Hamiltonian with every parameter replaced by its value.
  const Expr& bound_hamiltonian() const noexcept { return bound_; }

  // Bound partial derivatives, k is 1-based.
  const Expr& dh_dq(int k) const { return gradient_.at(slot(Coord::q(k))); }
  const Expr& dh_dp(int k) const { return gradient_.at(slot(Coord::p(k))); }

  /// Bound second derivative; a and b must be q or p coordinates.
  const Expr& hessian(Coord a, Coord b) const;

  /// Position of a q/p coordinate in the phase vector (q1..qm, p1..pm).
  std::size_t slot(Coord c) const;

  /// Total degree in (q, p) is at most two.
  bool is_quadratic() const noexcept { return phase_degree(hamiltonian_) <= 2; }

  /// H = T(p) + V(q, t): no monomial mixes momenta with positions or time.
  bool is_separable() const noexcept;

  /// FNV-1a digest of the dimension, Hamiltonian text and parameters.
  std::uint64_t hash() const noexcept;

 private:
  int dim_;
  Expr hamiltonian_;
  ParamMap params_;
  Expr bound_;
  std::vector<Expr> gradient_;
  std::vector<Expr> hessian_;
};

/// Parses the text form:
///
///   dim = <m>
///   param <name> = <float>    (repeatable)
///   H = <expr>
///
/// `#` starts a comment. Errors carry file line and column.
HamiltonianSystem parse_system(std::string_view text);

HamiltonianSystem load_system(const std::filesystem::path& path);

}  // namespace jmech
