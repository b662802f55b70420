#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "jmech/expr.hpp"
#include "jmech/system.hpp"

namespace jmech {

/// A point of the phase space, optionally with its Jacobi (vertical) block.
struct PhasePoint {
  double t = 0.0;
  std::vector<double> q;
  std::vector<double> p;
  std::vector<double> qd;
  std::vector<double> pd;

  bool has_vertical() const noexcept { return !qd.empty(); }
};

enum class Scheme { rk4, leapfrog };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

/// Samples on a uniform time grid.
struct Trajectory {
  int dim = 1;
  std::uint64_t system_hash = 0;
  Scheme scheme = Scheme::rk4;
  double dt = 0.0;
  std::vector<PhasePoint> samples;

  bool has_vertical() const noexcept { return !samples.empty() && samples.front().has_vertical(); }
  double start_time() const { return samples.front().t; }
  double end_time() const { return samples.back().t; }

  /// Throws DomainError unless times increase with uniform spacing (1e-12)
  /// and every sample carries vectors of length dim.
  void validate() const;
};

/// Hamilton equations of H and of the vertical-extended Hamiltonian d_V H.
/// Expressions keep parameters symbolic.
struct HamiltonEquations {
  std::vector<Expr> dq;   // d_t q^k  =  dH/dp_k
  std::vector<Expr> dp;   // d_t p_k  = -dH/dq^k
  std::vector<Expr> dqd;  // d_t qd^k =  d_V dH/dp_k
  std::vector<Expr> dpd;  // d_t pd_k = -d_V dH/dq^k
};

HamiltonEquations derive_hamilton_equations(const HamiltonianSystem& system);

/// Integrates from x0 to t_end. The step is shrunk to (t_end - t0) / n with
/// n = ceil((t_end - t0) / dt) so that the last sample lands on t_end. When
/// x0 has a vertical block the vertical-extended equations are integrated
/// as well. Leapfrog requires a separable Hamiltonian.
/// Throws BlowUpError when a coordinate leaves [-1e12, 1e12].
Trajectory integrate(const HamiltonianSystem& system, const PhasePoint& x0, double t_end, double dt,
                     Scheme scheme = Scheme::rk4);

/// Jacobi field along `base` from the initial value (c, s) = (qd(0), pd(0)),
/// integrated as v' = v M(t) with the scheme and grid of the base.
/// The returned trajectory repeats the base samples and adds the vertical block.
Trajectory jacobi_integrate(const HamiltonianSystem& system, const Trajectory& base, std::span<const double> c,
                            std::span<const double> s);

/// M(t) in the row convention v' = v M with v = (qd, pd):
///   M = [[A, -B], [C, -A^T]],  A_jk = d_qj d_pk H,  B_jk = d_qj d_qk H,  C_jk = d_pj d_pk H.
struct TransitionMatrix {
  double t = 0.0;
  Eigen::MatrixXd m;
};

TransitionMatrix transition_matrix(const HamiltonianSystem& system, const PhasePoint& at);

/// Ordered product exp(M(tau_0) h) exp(M(tau_1) h) ... over `factors` equal
/// subintervals of [t0, t], tau_i the midpoints. factors = 0 picks one
/// factor per base step. Base states between samples come from a single RK4
/// sub-step off the preceding sample.
Eigen::MatrixXd time_ordered_exp(const HamiltonianSystem& system, const Trajectory& base, double t, int factors = 0);

/// Cumulative ordered exponentials at every base sample, one factor per step.
std::vector<Eigen::MatrixXd> time_ordered_exp_series(const HamiltonianSystem& system, const Trajectory& base);

/// Brute-force Jacobi field (x(x0 + eps j0) - x(x0)) / eps on the integration grid.
Trajectory jacobi_fd_oracle(const HamiltonianSystem& system, const PhasePoint& x0, std::span<const double> c,
                            std::span<const double> s, double eps, double t_end, double dt,
                            Scheme scheme = Scheme::rk4);

/// Flow of a Hamiltonian of degree <= 2: x(t) = x(0) * linear + offset (row
/// vectors over (q, p)). `linear` is the ordered exponential of M, `offset`
/// the RK4 solution from x(0) = 0. t may be negative.
struct AffineFlow {
  double t = 0.0;
  Eigen::MatrixXd linear;
  Eigen::VectorXd offset;
};

AffineFlow affine_flow(const HamiltonianSystem& system, double t, double dt = 1e-3);

/// The flow at flow.t + h, one midpoint factor (and one RK4 step) further.
AffineFlow extend_affine_flow(const HamiltonianSystem& system, const AffineFlow& flow, double h);

/// Header t,q1..qm,p1..pm[,qd1..qdm,pd1..pdm]; 17 significant digits.
void write_csv(std::ostream& out, const Trajectory& trajectory);

/// {t, rows: [[...]]}
nlohmann::json matrix_to_json(double t, const Eigen::MatrixXd& m);

}  // namespace jmech
