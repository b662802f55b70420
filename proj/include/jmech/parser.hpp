#pragma once

// Recursive-descent parser for the expression DSL:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := base ('^' uint)?
//   base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' factor
//
// Identifiers: t, q<k>, p<k>, qd<k>, pd<k>, qdd<k>, pdd<k> with 1 <= k <= dim,
// parameter names made of letters and underscores, and the functions
// sin, cos, exp. Function arguments may depend on t and parameters only, so
// every parsed expression is a polynomial in the phase coordinates.

#include <set>
#include <string>
#include <string_view>

#include "jmech/expr.hpp"

namespace jmech {

/// Throws ParseError with the 1-based line and column of the offending token.
Expr parse(std::string_view source, int dim);

/// As above, but parameter names outside `known_params` are rejected as
/// unknown identifiers.
Expr parse(std::string_view source, int dim, const std::set<std::string>& known_params);

}  // namespace jmech
