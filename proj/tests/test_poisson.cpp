#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "jmech/dynamics.hpp"
#include "jmech/error.hpp"
#include "jmech/parser.hpp"
#include "jmech/poisson.hpp"
#include "jmech/symcalc.hpp"

using namespace jmech;

namespace {

constexpr BracketKind kAllKinds[] = {BracketKind::base, BracketKind::vertical, BracketKind::alt, BracketKind::second};

Expr c(Coord x) { return Expr::coordinate(x); }

double value_of(BracketKind kind, Coord a, Coord b, int m) {
  const Expr v = bracket(kind, c(a), c(b), m);
  REQUIRE(v.is_constant());
  return v.constant_term();
}

}  // namespace

TEST_SUITE("poisson") {
  TEST_CASE("base bracket") {
    CHECK(value_of(BracketKind::base, Coord::p(1), Coord::q(1), 1) == 1.0);
    CHECK(value_of(BracketKind::base, Coord::q(1), Coord::p(1), 1) == -1.0);
    CHECK(value_of(BracketKind::base, Coord::p(1), Coord::q(2), 2) == 0.0);
    const Expr f = parse("q1^2*q2 + 3*q2", 2);
    const Expr g = parse("q1 - q2^3", 2);
    CHECK(bracket(BracketKind::base, f, g, 2).is_zero());
    CHECK(bracket(BracketKind::base, parse("0.5*p1^2", 1), parse("q1^2", 1), 1) == parse("2*p1*q1", 1));
    CHECK_THROWS_AS(bracket(BracketKind::base, parse("qd1", 1), parse("q1", 1), 1), DomainError);
    CHECK_THROWS_AS(bracket(BracketKind::vertical, parse("qdd1", 1), parse("q1", 1), 1), DomainError);
  }

  TEST_CASE("vertical bracket conjugates q with pdot and qdot with p") {
    const int m = 2;
    const auto table = coordinate_table(BracketKind::vertical, m);
    REQUIRE(table.coords.size() == 8);
    for (std::size_t i = 0; i < table.coords.size(); ++i) {
      for (std::size_t j = 0; j < table.coords.size(); ++j) {
        const Coord a = table.coords[i];
        const Coord b = table.coords[j];
        double want = 0.0;
        if (a.index == b.index) {
          if ((a.kind == CoordKind::pd && b.kind == CoordKind::q) || (a.kind == CoordKind::p && b.kind == CoordKind::qd)) want = 1.0;
          if ((a.kind == CoordKind::q && b.kind == CoordKind::pd) || (a.kind == CoordKind::qd && b.kind == CoordKind::p)) want = -1.0;
        }
        CHECK(table.values[i][j] == want);
      }
    }
    CHECK(value_of(BracketKind::vertical, Coord::pd(1), Coord::q(1), 1) == 1.0);
    CHECK(value_of(BracketKind::vertical, Coord::p(1), Coord::qd(1), 1) == 1.0);
  }

  TEST_CASE("alternative bracket pairs like with like") {
    const int m = 2;
    const auto table = coordinate_table(BracketKind::alt, m);
    for (std::size_t i = 0; i < table.coords.size(); ++i) {
      for (std::size_t j = 0; j < table.coords.size(); ++j) {
        const Coord a = table.coords[i];
        const Coord b = table.coords[j];
        double want = 0.0;
        if (a.index == b.index) {
          if ((a.kind == CoordKind::p && b.kind == CoordKind::q) || (a.kind == CoordKind::pd && b.kind == CoordKind::qd)) want = 1.0;
          if ((a.kind == CoordKind::q && b.kind == CoordKind::p) || (a.kind == CoordKind::qd && b.kind == CoordKind::pd)) want = -1.0;
        }
        CHECK(table.values[i][j] == want);
      }
    }
  }

  TEST_CASE("second bracket makes sqrt(2) pdot and sqrt(2) qdot conjugate") {
    const Expr big_p = std::numbers::sqrt2 * c(Coord::pd(1));
    const Expr big_q = std::numbers::sqrt2 * c(Coord::qd(1));
    const Expr v = bracket(BracketKind::second, big_p, big_q, 1);
    CHECK(v.is_constant());
    CHECK(v.constant_term() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(value_of(BracketKind::second, Coord::pdd(1), Coord::q(1), 1) == 1.0);
    CHECK(value_of(BracketKind::second, Coord::p(1), Coord::qdd(1), 1) == 1.0);
    CHECK(value_of(BracketKind::second, Coord::pd(1), Coord::q(1), 1) == 0.0);
  }

  TEST_CASE("brackets of a function with itself or a constant vanish") {
    std::mt19937_64 rng(31);
    for (BracketKind kind : kAllKinds) {
      for (int i = 0; i < 20; ++i) {
        const Expr f = random_polynomial(kind, 2, 3, rng);
        CHECK(bracket(kind, f, f, 2).is_zero());
        CHECK(bracket(kind, Expr::constant(2.5), f, 2).is_zero());
        CHECK(bracket(kind, f, Expr::constant(-1.0), 2).is_zero());
      }
    }
  }

  TEST_CASE("axioms hold for every kind") {
    for (BracketKind kind : kAllKinds) {
      for (int m : {1, 2}) {
        const auto report = check_axioms(kind, 100, 1234 + static_cast<std::uint64_t>(m), m);
        CHECK_MESSAGE(report.ok(), to_string(kind) << " m=" << m << " failures=" << report.failures.size());
      }
    }
    CHECK_THROWS_AS(check_axioms(BracketKind::base, 0, 1, 1), DomainError);
  }

  TEST_CASE("reports serialize deterministically") {
    const auto a = to_json(check_axioms(BracketKind::second, 5, 99, 2));
    const auto b = to_json(check_axioms(BracketKind::second, 5, 99, 2));
    CHECK(a.dump() == b.dump());
    CHECK(a.at("kind") == "second");
    CHECK(a.at("trials") == 5);
    CHECK(a.at("seed") == 99);
    CHECK(a.at("failures").empty());
    CHECK(parse_bracket_kind("alt") == BracketKind::alt);
    CHECK_THROWS_AS(parse_bracket_kind("lie"), DomainError);
  }

  TEST_CASE("flow of the vertical Hamiltonian is generated by the vertical bracket") {
    const HamiltonianSystem system(1, parse("0.5*p1^2 + 0.5*(1 + 0.1*sin(t))^2*q1^2 + 0.1*q1^3", 1));
    const Expr hv = vertical_prolong(system.hamiltonian());
    const Expr f = parse("q1*pd1 + p1^2*qd1 + t*q1 - qd1*pd1", 1);
    const Expr rate = bracket(BracketKind::vertical, hv, f, 1) + diff(f, Coord::time());

    const double h = 1e-3;
    const Trajectory traj = integrate(system, {0.0, {0.4}, {-0.3}, {1.0}, {0.2}}, 2.0, h);
    const auto value = [&](std::size_t i) {
      const auto& x = traj.samples[i];
      return evaluate(f, {x.t, x.q, x.p, x.qd, x.pd, {}, {}, nullptr});
    };
    for (std::size_t i = 2; i + 2 < traj.samples.size(); i += 97) {
      const auto& x = traj.samples[i];
      const double exact = evaluate(rate, {x.t, x.q, x.p, x.qd, x.pd, {}, {}, nullptr});
      const double fd = (value(i - 2) - 8 * value(i - 1) + 8 * value(i + 1) - value(i + 2)) / (12 * h);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}
