#pragma once

// Symbolic expressions over phase coordinates, time and named parameters.
//
// Every Expr is kept in polynomial normal form: a sorted map from monomials
// to real coefficients. A monomial is a sorted product of atoms raised to
// positive integer powers, where an atom is a coordinate, a parameter or a
// call to sin/cos/exp of a (normalized) argument expression. Two expressions
// that are algebraically equal as polynomials in their atoms therefore have
// identical term maps, up to floating-point roundoff in the coefficients.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace jmech {

enum class CoordKind : std::uint8_t { t, q, p, qd, pd, qdd, pdd };

/// A coordinate of the (second) vertical-extended phase space. Indices are
/// 1-based; time carries index 0.
struct Coord {
  CoordKind kind = CoordKind::t;
  int index = 0;

  static constexpr Coord time() { return {CoordKind::t, 0}; }
  static constexpr Coord q(int k) { return {CoordKind::q, k}; }
  static constexpr Coord p(int k) { return {CoordKind::p, k}; }
  static constexpr Coord qd(int k) { return {CoordKind::qd, k}; }
  static constexpr Coord pd(int k) { return {CoordKind::pd, k}; }
  static constexpr Coord qdd(int k) { return {CoordKind::qdd, k}; }
  static constexpr Coord pdd(int k) { return {CoordKind::pdd, k}; }

  friend constexpr auto operator<=>(const Coord&, const Coord&) = default;
};

std::string to_string(Coord c);

enum class Func : std::uint8_t { sin, cos, exp };

class Expr;

struct Param {
  std::string name;
};

struct FuncCall {
  Func func;
  std::shared_ptr<const Expr> arg;
};

using Atom = std::variant<Coord, Param, FuncCall>;

std::strong_ordering compare(const Atom& a, const Atom& b);

using Factor = std::pair<Atom, unsigned>;

/// Sorted by atom; every exponent is positive. The empty monomial is 1.
using Monomial = std::vector<Factor>;

std::strong_ordering compare(const Monomial& a, const Monomial& b);

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
};

using ParamMap = std::map<std::string, double>;

class Expr {
 public:
  using Terms = std::map<Monomial, double, MonomialLess>;

  /// The zero polynomial.
  Expr() = default;

  static Expr constant(double value);
  static Expr coordinate(Coord c);
  static Expr parameter(std::string name);
  /// sin/cos/exp of `arg`; folded to a constant when `arg` is constant.
  static Expr call(Func f, const Expr& arg);
  static Expr monomial(Monomial mono, double coefficient);

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  /// Coefficient of the empty monomial.
  double constant_term() const noexcept;

  Expr& operator+=(const Expr& other);
  Expr& operator-=(const Expr& other);
  Expr& operator*=(const Expr& other);
  Expr& operator*=(double scale);

  friend Expr operator+(Expr a, const Expr& b) { return a += b; }
  friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator*(Expr a, double s) { return a *= s; }
  friend Expr operator*(double s, Expr a) { return a *= s; }
  friend Expr operator-(Expr a) { return a *= -1.0; }

  /// Exact structural equality of the normal forms.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  void add_term(const Monomial& mono, double coefficient);

  Terms terms_;
};

Expr pow(const Expr& base, unsigned exponent);

std::strong_ordering compare(const Expr& a, const Expr& b);

/// Normal forms agree coefficient-wise within `tol` (absolute).
bool equivalent(const Expr& a, const Expr& b, double tol = 1e-12);

/// Exact partial derivative with respect to `wrt`, chain rule through
/// sin/cos/exp.
Expr diff(const Expr& e, Coord wrt);

/// Replaces atoms for which `fn` returns a value; function arguments are
/// rewritten recursively.
Expr rewrite_atoms(const Expr& e, const std::function<std::optional<Expr>(const Atom&)>& fn);

/// Simultaneous substitution of coordinates.
Expr substitute(const Expr& e, const std::map<Coord, Expr>& replacements);

/// Replaces every parameter bound in `params` by its value.
Expr bind(const Expr& e, const ParamMap& params);

std::set<Coord> coordinates(const Expr& e);
std::set<std::string> parameters(const Expr& e);
bool depends_on(const Expr& e, CoordKind kind);

/// Highest total degree in the non-time coordinates over all monomials;
/// -1 for the zero polynomial.
int phase_degree(const Expr& e);

/// Values for evaluation. Coordinate spans are indexed by `index - 1`.
struct Valuation {
  double t = 0.0;
  std::span<const double> q;
  std::span<const double> p;
  std::span<const double> qd;
  std::span<const double> pd;
  std::span<const double> qdd;
  std::span<const double> pdd;
  const ParamMap* params = nullptr;
};

double evaluate(const Expr& e, const Valuation& at);

/// Text in the DSL grammar; parsing it back yields an equal Expr.
std::string to_string(const Expr& e);

}  // namespace jmech
