// One line per acceptance criterion; exit status 1 when any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "jmech/dynamics.hpp"
#include "jmech/error.hpp"
#include "jmech/hilbert.hpp"
#include "jmech/parser.hpp"
#include "jmech/poisson.hpp"
#include "jmech/symcalc.hpp"

using namespace jmech;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records value < bound under `label`.
  void below(const std::string& label, double value, double bound) {
    const bool ok = std::isfinite(value) && value < bound;
    pass = pass && ok;
    char text[160];
    std::snprintf(text, sizeof text, "%s%s %.3g%s%.0e", detail.empty() ? "" : "; ", label.c_str(), value,
                  ok ? " < " : " >= ", bound);
    detail += text;
  }

  void require(const std::string& label, bool ok) {
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + label + (ok ? " ok" : " FAILED");
  }

  void note(const std::string& text) { detail += (detail.empty() ? "" : "; ") + text; }
};

HamiltonianSystem oscillator(double omega) {
  return HamiltonianSystem(1, parse("0.5*(p1^2 + w^2*q1^2)", 1), {{"w", omega}});
}

HamiltonianSystem driven() { return HamiltonianSystem(1, parse("0.5*(p1^2 + (1 + 0.1*sin(t))^2*q1^2)", 1)); }

HamiltonianSystem free_particle() { return HamiltonianSystem(1, parse("0.5*p1^2", 1)); }

PhasePoint point(double q, double p) { return {0.0, {q}, {p}, {}, {}}; }

// Closed-form oscillator flow applied to (x, y) at time t.
std::pair<double, double> rotate(double omega, double x, double y, double t) {
  return {x * std::cos(omega * t) + y / omega * std::sin(omega * t),
          -x * omega * std::sin(omega * t) + y * std::cos(omega * t)};
}

double vertical_gap(const Trajectory& a, const Trajectory& b, std::size_t stride_b = 1) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto& x = a.samples[i];
    const auto& y = b.samples.at(i * stride_b);
    gap = std::max({gap, std::abs(x.qd[0] - y.qd[0]), std::abs(x.pd[0] - y.pd[0])});
  }
  return gap;
}

double relative_residual(const StateVector& applied, const StateVector& v, double eigenvalue) {
  return (applied.coefficients - eigenvalue * v.coefficients).norm() / (std::abs(eigenvalue) * v.coefficients.norm());
}

Outcome oscillator_trajectory() {
  Outcome o;
  double worst = 0.0;
  for (double w : {1.0, 2.0}) {
    for (auto [q0, p0] : {std::pair{1.0, 0.0}, std::pair{0.3, -0.7}}) {
      const auto traj = integrate(oscillator(w), point(q0, p0), 10.0, 1e-3);
      for (const auto& x : traj.samples) {
        const auto [q, p] = rotate(w, q0, p0, x.t);
        worst = std::max({worst, std::abs(x.q[0] - q), std::abs(x.p[0] - p)});
      }
    }
  }
  o.below("max |x - closed form|", worst, 1e-8);
  return o;
}

Outcome jacobi_fields() {
  Outcome o;
  double variational = 0.0;
  double oracle = 0.0;
  double texp = 0.0;
  for (double w : {1.0, 2.0}) {
    for (auto [c, s] : {std::pair{1.0, 0.0}, std::pair{0.3, -0.7}}) {
      const std::vector<double> cv{c};
      const std::vector<double> sv{s};
      const auto base = integrate(oscillator(w), point(1.0, 0.0), 10.0, 1e-3);
      const auto field = jacobi_integrate(oscillator(w), base, cv, sv);
      const auto fd = jacobi_fd_oracle(oscillator(w), point(1.0, 0.0), cv, sv, 1e-6, 10.0, 1e-3);
      for (std::size_t i = 0; i < field.samples.size(); ++i) {
        const auto [qd, pd] = rotate(w, c, s, field.samples[i].t);
        variational = std::max({variational, std::abs(field.samples[i].qd[0] - qd), std::abs(field.samples[i].pd[0] - pd)});
        oracle = std::max({oracle, std::abs(fd.samples[i].qd[0] - qd), std::abs(fd.samples[i].pd[0] - pd)});
      }
      const auto quarter = integrate(oscillator(w), point(1.0, 0.0), kPi / 2, 1e-3);
      const Eigen::RowVector2d v = Eigen::RowVector2d(c, s) * time_ordered_exp(oscillator(w), quarter, kPi / 2, 200);
      const auto [qd, pd] = rotate(w, c, s, kPi / 2);
      texp = std::max({texp, std::abs(v(0) - qd), std::abs(v(1) - pd)});
    }
  }
  o.below("oscillator variational", variational, 1e-8);
  o.below("fd oracle", oracle, 1e-4);
  o.below("T-exp n=200", texp, 1e-6);

  // Time-dependent oscillator against a run at half the step.
  const std::vector<double> cv{0.3};
  const std::vector<double> sv{-1.0};
  const auto base = integrate(driven(), point(1.0, 0.5), 10.0, 1e-3);
  const auto reference_base = integrate(driven(), point(1.0, 0.5), 10.0, 5e-4);
  const auto field = jacobi_integrate(driven(), base, cv, sv);
  const auto reference = jacobi_integrate(driven(), reference_base, cv, sv);
  const auto fd = jacobi_fd_oracle(driven(), point(1.0, 0.5), cv, sv, 1e-6, 10.0, 1e-3);
  o.below("driven variational", vertical_gap(field, reference, 2), 1e-8);
  o.below("driven fd oracle", vertical_gap(fd, reference, 2), 1e-4);

  const auto quarter = integrate(driven(), point(1.0, 0.5), kPi / 2, 1e-3);
  const auto quarter_reference =
      jacobi_integrate(driven(), integrate(driven(), point(1.0, 0.5), kPi / 2, 5e-4), cv, sv);
  const Eigen::RowVector2d v = Eigen::RowVector2d(0.3, -1.0) * time_ordered_exp(driven(), quarter, kPi / 2, 200);
  const auto& end = quarter_reference.samples.back();
  o.below("driven T-exp n=200", std::max(std::abs(v(0) - end.qd[0]), std::abs(v(1) - end.pd[0])), 1e-6);
  return o;
}

Outcome poisson_axioms() {
  Outcome o;
  int failures = 0;
  for (BracketKind kind : {BracketKind::base, BracketKind::vertical, BracketKind::alt, BracketKind::second}) {
    for (int m : {1, 2}) failures += static_cast<int>(check_axioms(kind, 100, 2024, m).failures.size());
  }
  o.require("axioms (4 kinds, m = 1, 2, 100 trials)", failures == 0);

  // Canonical pairs, with the expected nonzero entries listed independently.
  struct Pair {
    BracketKind kind;
    CoordKind left;
    CoordKind right;
    double value;
  };
  const std::vector<Pair> conjugate{
      {BracketKind::base, CoordKind::p, CoordKind::q, 1.0},
      {BracketKind::vertical, CoordKind::pd, CoordKind::q, 1.0},
      {BracketKind::vertical, CoordKind::p, CoordKind::qd, 1.0},
      {BracketKind::alt, CoordKind::p, CoordKind::q, 1.0},
      {BracketKind::alt, CoordKind::pd, CoordKind::qd, 1.0},
      {BracketKind::second, CoordKind::pdd, CoordKind::q, 1.0},
      {BracketKind::second, CoordKind::p, CoordKind::qdd, 1.0},
      {BracketKind::second, CoordKind::pd, CoordKind::qd, 0.5},
  };
  const int m = 2;
  bool exact = true;
  for (BracketKind kind : {BracketKind::base, BracketKind::vertical, BracketKind::alt, BracketKind::second}) {
    const auto table = coordinate_table(kind, m);
    for (std::size_t i = 0; i < table.coords.size(); ++i) {
      for (std::size_t j = 0; j < table.coords.size(); ++j) {
        const Coord a = table.coords[i];
        const Coord b = table.coords[j];
        double want = 0.0;
        for (const auto& pair : conjugate) {
          if (pair.kind != kind || a.index != b.index) continue;
          if (a.kind == pair.left && b.kind == pair.right) want = pair.value;
          if (a.kind == pair.right && b.kind == pair.left) want = -pair.value;
        }
        exact = exact && table.values[i][j] == want;
      }
    }
  }
  const Expr scaled = bracket(BracketKind::second, std::numbers::sqrt2 * Expr::coordinate(Coord::pd(1)),
                              std::numbers::sqrt2 * Expr::coordinate(Coord::qd(1)), 1);
  exact = exact && scaled.is_constant() && std::abs(scaled.constant_term() - 1.0) < 1e-15;
  o.require("canonical pair tables", exact);
  return o;
}

Outcome generator_commutators() {
  Outcome o;
  const HermiteBasis basis(32, 1, 1.0);
  const auto g = build_generators(basis);
  // Order: phi, pi, phidot, pidot, I.
  const std::vector<const OperatorMatrix*> ops{&g.phi[0], &g.pi[0], &g.phidot[0], &g.pidot[0], &g.id};
  const Complex minus_i(0.0, -1.0);
  double worst = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = 0; j < ops.size(); ++j) {
      Complex want = 0.0;
      if ((i == 1 && j == 2) || (i == 3 && j == 0)) want = minus_i;
      if ((i == 2 && j == 1) || (i == 0 && j == 3)) want = -minus_i;
      worst = std::max(worst, clean_deviation(commutator(*ops[i], *ops[j]), want));
      ++pairs;
    }
  }
  o.below(std::to_string(pairs) + " ordered pairs, max deviation", worst, 1e-10);
  o.below("library table check", commutator_check(basis).max_deviation, 1e-10);
  return o;
}

Outcome eigenstates() {
  Outcome o;
  const HermiteBasis basis(40, 1);
  const auto g = build_generators(basis);
  const std::vector<double> a{0.5};
  const std::vector<double> b{0.3};
  const std::vector<double> step{0.2};
  const auto v = project_eigenstate(basis, a, b);
  o.below("phi residual", relative_residual(g.phi[0] * v, v, 0.5), 1e-6);
  o.below("pi residual", relative_residual(g.pi[0] * v, v, 0.3), 1e-6);
  const auto shifted = weyl_operator(basis, Shift::b, step) * v;
  const double similarity = cosine_similarity(shifted, project_eigenstate(basis, a, std::vector<double>{0.5}));
  o.below("1 - Weyl cosine similarity", 1.0 - similarity, 0.01);
  o.below("|overlap - 1|", std::abs(weyl_function_overlap(basis, a, b, Shift::b, step) - 1.0), 1e-10);
  return o;
}

Outcome instant_operators_check() {
  Outcome o;
  const HermiteBasis basis(40, 1);
  const std::vector<double> a{0.5};
  const std::vector<double> b{0.3};
  const auto v = project_eigenstate(basis, a, b);
  double eigen = 0.0;
  double table = 0.0;
  for (double w : {1.0, 2.0}) {
    for (double t : {0.0, 0.5, 1.0}) {
      const auto ops = instant_operators(oscillator(w), basis, t);
      const auto [q, p] = rotate(w, 0.5, 0.3, t);
      eigen = std::max({eigen, relative_residual(ops.r[0] * v, v, q), relative_residual(ops.r[1] * v, v, p)});
      table = std::max(table, instant_commutator_check(oscillator(w), HermiteBasis(32, 1), t).max_deviation);
    }
  }
  o.below("eigenvalue rel. error", eigen, 1e-5);
  o.below("instant table", table, 1e-8);
  return o;
}

Outcome evolution() {
  Outcome o;
  const HermiteBasis basis(32, 1);
  double osc = 0.0;
  double free = 0.0;
  for (double t : {0.0, 0.5, 1.0}) {
    osc = std::max(osc, evolution_residual(oscillator(1.0), basis, t, 1e-5).max_residual);
    free = std::max(free, evolution_residual(free_particle(), basis, t, 1e-5).max_residual);
  }
  o.below("oscillator residual", osc, 1e-6);
  o.below("free particle residual", free, 1e-6);
  return o;
}

Outcome quadratic_split() {
  Outcome o;
  const HamiltonianSystem system(1, parse("0.5*(p1^2 + omega^2*q1^2)", 1), {{"omega", 1.0}});
  const Expr h2 = in_deviation_coordinates(split_h1_h2(system).deviation);
  o.require("H2 == (P^2 + omega^2 Q^2)/2 exactly", h2 == parse("0.5*(pd1^2 + omega^2*qd1^2)", 1));
  return o;
}

Outcome hermiticity() {
  Outcome o;
  const auto g = build_generators(HermiteBasis(32, 1));
  o.below("phidot defect", hermiticity_defect(g.phidot[0]), 1e-12);
  o.below("pidot defect", hermiticity_defect(g.pidot[0]), 1e-12);
  char text[120];
  std::snprintf(text, sizeof text, "phi defect %.3g, pi defect %.3g (reported only)", hermiticity_defect(g.phi[0]),
                hermiticity_defect(g.pi[0]));
  o.note(text);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oscillator trajectory", oscillator_trajectory},
      {"Jacobi field, three routes", jacobi_fields},
      {"Poisson axioms and canonical pairs", poisson_axioms},
      {"generator commutation table", generator_commutators},
      {"eigenstates and Weyl shift", eigenstates},
      {"instant operators", instant_operators_check},
      {"Heisenberg evolution", evolution},
      {"quadratic part of the split", quadratic_split},
      {"hermiticity diagnostics", hermiticity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("threw: ") + e.what();
    }
    if (!outcome.pass) ++failed;
    std::printf("%s %zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                outcome.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
