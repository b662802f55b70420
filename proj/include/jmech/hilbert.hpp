#pragma once

// Truncated matrix representation on L^2(R^{2m}) under the Gaussian measure,
// in the tensor basis of orthonormal Hermite polynomials. Axes are ordered
// x^1..x^m, y_1..y_m; axis 0 is the most significant digit of a flat index.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "json.hpp"
#include "jmech/system.hpp"

namespace jmech {

using Complex = std::complex<double>;
using SparseOperator = Eigen::SparseMatrix<Complex>;

class HermiteBasis {
 public:
  /// N modes per axis (>= 4), fiber dimension m in {1, 2}, hbar > 0.
  /// m = 2 is limited to N <= 16.
  HermiteBasis(int modes, int dim, double hbar = 1.0);

  int modes() const noexcept { return modes_; }
  int dim() const noexcept { return dim_; }
  int axes() const noexcept { return 2 * dim_; }
  double hbar() const noexcept { return hbar_; }
  Eigen::Index size() const noexcept { return size_; }

  /// Every per-axis index of the flat basis index is at most N - 2.
  bool is_clean(Eigen::Index flat) const;

  friend bool operator==(const HermiteBasis& a, const HermiteBasis& b) {
    return a.modes_ == b.modes_ && a.dim_ == b.dim_ && a.hbar_ == b.hbar_;
  }

 private:
  int modes_;
  int dim_;
  double hbar_;
  Eigen::Index size_;
};

struct OperatorMatrix {
  HermiteBasis basis;
  SparseOperator matrix;
};

struct StateVector {
  HermiteBasis basis;
  Eigen::VectorXcd coefficients;
  /// Fraction of the Gaussian-measure norm kept by the truncation.
  double captured = 1.0;
};

// Binary operations throw DomainError on mismatched bases.
OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(Complex s, const OperatorMatrix& a);
StateVector operator*(const OperatorMatrix& a, const StateVector& v);
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix adjoint(const OperatorMatrix& a);
OperatorMatrix identity(const HermiteBasis& basis);

/// max |a - expected * I| over rows and columns of the clean subspace.
double clean_deviation(const OperatorMatrix& a, Complex expected);

struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;  // sum to one: weight exp(-x^2) / sqrt(pi)
};

/// Gauss-Hermite rule with `count` nodes for the normalized weight.
Quadrature gauss_hermite(int count);

/// Orthonormal Hermite polynomials h_0(x) .. h_{count-1}(x).
Eigen::VectorXd hermite_values(int count, double x);

/// max |G - I| for the one-axis Gram matrix computed with 2N nodes.
double gram_defect(const HermiteBasis& basis);

/// One-axis multiplication by x: symmetric tridiagonal, off-diagonal sqrt(n/2).
Eigen::MatrixXd coordinate_matrix(int modes);
/// One-axis d/dx: sqrt(2n) at (n-1, n).
Eigen::MatrixXd derivative_matrix(int modes);

/// `factor` on axis `axis`, identity elsewhere.
OperatorMatrix on_axis(const HermiteBasis& basis, int axis, const Eigen::MatrixXcd& factor);

struct Generators {
  std::vector<OperatorMatrix> phi;     //  i hbar d/dy_k
  std::vector<OperatorMatrix> pi;      // -i hbar d/dx^k
  std::vector<OperatorMatrix> phidot;  //  x^k
  std::vector<OperatorMatrix> pidot;   //  y_k
  OperatorMatrix id;
};

Generators build_generators(const HermiteBasis& basis);

struct CommutatorEntry {
  std::string left;
  std::string right;
  Complex expected;
  double deviation = 0.0;
};

struct CommutatorReport {
  std::vector<CommutatorEntry> entries;
  double max_deviation = 0.0;
};

/// Every ordered pair among (r[0..2m), rdot[0..2m), I) against the table
///   [p_k, qdot^j] = [pdot_k, q^j] = -i hbar delta, reversed pairs +i hbar delta,
/// all others zero; r = (q, p), rdot = (qdot, pdot). `names` labels the 4m
/// operators in the same order.
CommutatorReport table_check(const HermiteBasis& basis, const std::vector<OperatorMatrix>& r,
                             const std::vector<OperatorMatrix>& rdot, const std::vector<std::string>& names);

CommutatorReport commutator_check(const HermiteBasis& basis);

/// Coefficients of f_{a,b} = exp[(i/hbar)(b.x - a.y)] by 2N-node quadrature.
/// Throws CaptureError when less than 1 - 1e-8 of the norm is captured.
StateVector project_eigenstate(const HermiteBasis& basis, std::span<const double> a, std::span<const double> b);

enum class Shift { a, b };

/// shift a: exp(-(i/hbar) alpha^k pidot_k); shift b: exp((i/hbar) beta_k phidot^k).
OperatorMatrix weyl_operator(const HermiteBasis& basis, Shift which, std::span<const double> amount);

/// The same at time t, built from the instant operators rdot(t). Needs a
/// Hamiltonian of degree at most two unless t = 0.
OperatorMatrix weyl_operator(const HamiltonianSystem& system, const HermiteBasis& basis, Shift which,
                             std::span<const double> amount, double t);

/// Normalized quadrature overlap <f_{shifted labels}, exp(...) f_{a,b}> of the
/// functions themselves, with 2N nodes per axis.
Complex weyl_function_overlap(const HermiteBasis& basis, std::span<const double> a, std::span<const double> b,
                              Shift which, std::span<const double> amount);

/// |<u, w>| / (|u| |w|)
double cosine_similarity(const StateVector& u, const StateVector& w);

struct InstantOperators {
  double t = 0.0;
  std::vector<OperatorMatrix> r;     // (q^1..q^m, p_1..p_m)(t)
  std::vector<OperatorMatrix> rdot;  // (qdot^1..qdot^m, pdot_1..pdot_m)(t)
};

/// x(t) = x(0) Phi(t) + c(t) with (q(0), p(0)) -> (phi, pi);
/// rdot(t) = (phidot, pidot) Phi(t). Needs degree <= 2 in (q, p).
InstantOperators instant_operators(const HamiltonianSystem& system, const HermiteBasis& basis, double t,
                                   double dt = 1e-3);

CommutatorReport instant_commutator_check(const HamiltonianSystem& system, const HermiteBasis& basis, double t);

/// d_V H at time t with (q, p, qd, pd) replaced by the instant operators,
/// every product averaged over its distinct orderings.
OperatorMatrix quantize_vertical_hamiltonian(const HamiltonianSystem& system, const InstantOperators& ops);

struct EvolutionReport {
  std::vector<std::string> names;
  std::vector<double> residuals;
  double max_residual = 0.0;
};

/// i hbar (X(t + h) - X(t - h)) / 2h - [X(t), H_V(t)] on the clean subspace
/// for X over the 4m instant operators.
EvolutionReport evolution_residual(const HamiltonianSystem& system, const HermiteBasis& basis, double t,
                                   double dt_fd);

/// max |op - op^dagger| over the full matrix.
double hermiticity_defect(const OperatorMatrix& op);

nlohmann::json to_json(const HermiteBasis& basis);
nlohmann::json to_json(const OperatorMatrix& op);
nlohmann::json to_json(const StateVector& v);
nlohmann::json to_json(const CommutatorReport& report);
nlohmann::json to_json(const EvolutionReport& report);

}  // namespace jmech
