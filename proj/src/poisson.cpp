#include "jmech/poisson.hpp"

#include <algorithm>
#include <array>

#include "jmech/error.hpp"

namespace jmech {

namespace {

struct Pairing {
  CoordKind left;
  CoordKind right;
  double weight;
};

std::vector<Pairing> pairings(BracketKind kind) {
  using K = CoordKind;
  switch (kind) {
    case BracketKind::base:
      return {{K::p, K::q, 1.0}, {K::q, K::p, -1.0}};
    case BracketKind::vertical:
      return {{K::pd, K::q, 1.0}, {K::p, K::qd, 1.0}, {K::qd, K::p, -1.0}, {K::q, K::pd, -1.0}};
    case BracketKind::alt:
      return {{K::p, K::q, 1.0}, {K::q, K::p, -1.0}, {K::pd, K::qd, 1.0}, {K::qd, K::pd, -1.0}};
    case BracketKind::second:
      return {{K::pdd, K::q, 1.0}, {K::p, K::qdd, 1.0}, {K::qdd, K::p, -1.0},
              {K::q, K::pdd, -1.0}, {K::pd, K::qd, 0.5}, {K::qd, K::pd, -0.5}};
  }
  return {};
}

std::vector<CoordKind> admitted_kinds(BracketKind kind) {
  using K = CoordKind;
  switch (kind) {
    case BracketKind::base: return {K::q, K::p};
    case BracketKind::vertical:
    case BracketKind::alt: return {K::q, K::p, K::qd, K::pd};
    case BracketKind::second: return {K::q, K::p, K::qd, K::pd, K::qdd, K::pdd};
  }
  return {};
}

void check_admitted(BracketKind kind, const Expr& e, int dim) {
  for (Coord c : coordinates(e)) {
    if (!admits(kind, c.kind)) {
      throw DomainError("coordinate " + to_string(c) + " is not admitted by the " + std::string(to_string(kind)) + " bracket");
    }
    if (c.kind != CoordKind::t && c.index > dim) throw DomainError("coordinate " + to_string(c) + " out of range");
  }
}

}  // namespace

std::string_view to_string(BracketKind kind) {
  switch (kind) {
    case BracketKind::base: return "base";
    case BracketKind::vertical: return "vertical";
    case BracketKind::alt: return "alt";
    case BracketKind::second: return "second";
  }
  return "?";
}

BracketKind parse_bracket_kind(std::string_view name) {
  for (auto kind : {BracketKind::base, BracketKind::vertical, BracketKind::alt, BracketKind::second}) {
    if (name == to_string(kind)) return kind;
  }
  throw DomainError("unknown bracket kind '" + std::string(name) + "'");
}

bool admits(BracketKind kind, CoordKind coord) {
  if (coord == CoordKind::t) return true;
  const auto kinds = admitted_kinds(kind);
  return std::find(kinds.begin(), kinds.end(), coord) != kinds.end();
}

Expr bracket(BracketKind kind, const Expr& f, const Expr& g, int dim) {
  check_admitted(kind, f, dim);
  check_admitted(kind, g, dim);
  Expr out;
  for (const auto& [left, right, weight] : pairings(kind)) {
    for (int k = 1; k <= dim; ++k) {
      const Expr df = diff(f, Coord{left, k});
      if (df.is_zero()) continue;
      const Expr dg = diff(g, Coord{right, k});
      if (dg.is_zero()) continue;
      out += weight * (df * dg);
    }
  }
  return out;
}

CoordinateTable coordinate_table(BracketKind kind, int dim) {
  CoordinateTable table;
  for (CoordKind ck : admitted_kinds(kind)) {
    for (int k = 1; k <= dim; ++k) table.coords.push_back(Coord{ck, k});
  }
  for (Coord a : table.coords) {
    std::vector<double> row;
    for (Coord b : table.coords) {
      const Expr v = bracket(kind, Expr::coordinate(a), Expr::coordinate(b), dim);
      row.push_back(v.constant_term());
    }
    table.values.push_back(std::move(row));
  }
  return table;
}

Expr random_polynomial(BracketKind kind, int dim, int max_degree, std::mt19937_64& rng) {
  std::vector<Coord> pool;
  for (CoordKind ck : admitted_kinds(kind)) {
    for (int k = 1; k <= dim; ++k) pool.push_back(Coord{ck, k});
  }
  // Plain modular reduction keeps the stream identical across standard libraries.
  const auto draw = [&rng](std::uint64_t n) { return rng() % n; };
  Expr out;
  const auto terms = 1 + draw(4);
  for (std::uint64_t i = 0; i < terms; ++i) {
    const auto degree = draw(static_cast<std::uint64_t>(max_degree) + 1);
    Expr term = Expr::constant(static_cast<double>(draw(7)) - 3.0);
    for (std::uint64_t d = 0; d < degree; ++d) term *= Expr::coordinate(pool[draw(pool.size())]);
    out += term;
  }
  return out;
}

AxiomReport check_axioms(BracketKind kind, int trials, std::uint64_t seed, int dim) {
  if (trials < 1) throw DomainError("trials must be at least 1");
  if (dim < 1) throw DomainError("dimension must be positive");
  AxiomReport report;
  report.kind = kind;
  report.trials = trials;
  report.seed = seed;
  report.dim = dim;

  std::mt19937_64 rng(seed);
  const auto br = [&](const Expr& a, const Expr& b) { return bracket(kind, a, b, dim); };
  for (int trial = 0; trial < trials; ++trial) {
    const Expr f = random_polynomial(kind, dim, 3, rng);
    const Expr g = random_polynomial(kind, dim, 3, rng);
    const Expr h = random_polynomial(kind, dim, 3, rng);
    const double alpha = static_cast<double>(rng() % 7) - 3.0;
    const double beta = static_cast<double>(rng() % 7) - 3.0;

    const std::array<std::pair<const char*, Expr>, 4> laws = {{
        {"antisymmetry", br(f, g) + br(g, f)},
        {"bilinearity", br(alpha * f + beta * g, h) - alpha * br(f, h) - beta * br(g, h)},
        {"leibniz", br(f, g * h) - br(f, g) * h - g * br(f, h)},
        {"jacobi", br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))},
    }};
    for (const auto& [law, residual] : laws) {
      if (!equivalent(residual, Expr())) report.failures.push_back({law, f, g, h, residual});
    }
  }
  return report;
}

nlohmann::json to_json(const AxiomReport& report) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& failure : report.failures) {
    failures.push_back({{"f", to_string(failure.f)},
                        {"g", to_string(failure.g)},
                        {"h", to_string(failure.h)},
                        {"law", failure.law},
                        {"residual_expr", to_string(failure.residual)}});
  }
  return {{"kind", std::string(to_string(report.kind))},
          {"trials", report.trials},
          {"seed", report.seed},
          {"dim", report.dim},
          {"failures", failures}};
}

}  // namespace jmech
