#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "jmech/expr.hpp"

namespace jmech {

/// The Poisson brackets on V*Q (base), on VV*Q (vertical and the
/// alternative one) and on the second vertical extension (second).
enum class BracketKind { base, vertical, alt, second };

std::string_view to_string(BracketKind kind);
BracketKind parse_bracket_kind(std::string_view name);

/// Coordinate kinds allowed in the arguments of a bracket; t is always allowed.
bool admits(BracketKind kind, CoordKind coord);

/// Coordinate formula of the bracket, signs as in
///   {f, g} = d_p f d_q g - d_q f d_p g
/// so that {p_k, q^j} = delta. Throws DomainError on a coordinate the kind
/// does not admit.
Expr bracket(BracketKind kind, const Expr& f, const Expr& g, int dim);

/// Bracket values among the admitted coordinates; values[i][j] = {c_i, c_j}.
struct CoordinateTable {
  std::vector<Coord> coords;
  std::vector<std::vector<double>> values;
};

CoordinateTable coordinate_table(BracketKind kind, int dim);

/// Random polynomial over the admitted coordinates with integer
/// coefficients in [-3, 3] and total degree at most `max_degree`.
Expr random_polynomial(BracketKind kind, int dim, int max_degree, std::mt19937_64& rng);

struct AxiomFailure {
  std::string law;
  Expr f;
  Expr g;
  Expr h;
  Expr residual;
};

struct AxiomReport {
  BracketKind kind = BracketKind::base;
  int trials = 0;
  std::uint64_t seed = 0;
  int dim = 1;
  std::vector<AxiomFailure> failures;

  bool ok() const noexcept { return failures.empty(); }
};

/// Checks antisymmetry, bilinearity, the Leibniz rule and the Jacobi
/// identity symbolically on `trials` random triples of degree <= 3.
AxiomReport check_axioms(BracketKind kind, int trials, std::uint64_t seed, int dim);

nlohmann::json to_json(const AxiomReport& report);

}  // namespace jmech
