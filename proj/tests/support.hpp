#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "jmech/expr.hpp"

namespace jmech::testing {

// Coordinates for an m-dimensional point of the second vertical extension.
struct Point {
  double t = 0.0;
  std::vector<double> q, p, qd, pd, qdd, pdd;

  Valuation valuation() const { return {t, q, p, qd, pd, qdd, pdd, nullptr}; }

  double& at(Coord c) {
    switch (c.kind) {
      case CoordKind::t: return t;
      case CoordKind::q: return q[c.index - 1];
      case CoordKind::p: return p[c.index - 1];
      case CoordKind::qd: return qd[c.index - 1];
      case CoordKind::pd: return pd[c.index - 1];
      case CoordKind::qdd: return qdd[c.index - 1];
      case CoordKind::pdd: return pdd[c.index - 1];
    }
    return t;
  }
};

inline Point random_point(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Point x;
  x.t = u(rng);
  for (auto* v : {&x.q, &x.p, &x.qd, &x.pd, &x.qdd, &x.pdd}) {
    for (int k = 0; k < m; ++k) v->push_back(u(rng));
  }
  return x;
}

// Central difference of e along c with step h.
inline double central_difference(const Expr& e, Point x, Coord c, double h = 1e-5) {
  const double x0 = x.at(c);
  x.at(c) = x0 + h;
  const double up = evaluate(e, x.valuation());
  x.at(c) = x0 - h;
  const double down = evaluate(e, x.valuation());
  return (up - down) / (2 * h);
}

// Random polynomial in t, q, p (and optionally the dotted coordinates),
// integer coefficients in [-3, 3].
inline Expr random_expr(int m, int max_degree, std::mt19937_64& rng, bool dotted = false) {
  std::vector<Coord> atoms{Coord::time()};
  for (int k = 1; k <= m; ++k) {
    atoms.push_back(Coord::q(k));
    atoms.push_back(Coord::p(k));
    if (dotted) {
      atoms.push_back(Coord::qd(k));
      atoms.push_back(Coord::pd(k));
    }
  }
  std::uniform_int_distribution<int> terms(1, 5);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> degree(0, max_degree);
  std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
  Expr out;
  const int n = terms(rng);
  for (int i = 0; i < n; ++i) {
    Expr term = Expr::constant(coef(rng));
    const int d = degree(rng);
    for (int j = 0; j < d; ++j) term *= Expr::coordinate(atoms[pick(rng)]);
    out += term;
  }
  return out;
}

}  // namespace jmech::testing
