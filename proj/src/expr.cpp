#include "jmech/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

#include "jmech/error.hpp"

namespace jmech {

namespace {

const char* kind_prefix(CoordKind kind) {
  switch (kind) {
    case CoordKind::t: return "t";
    case CoordKind::q: return "q";
    case CoordKind::p: return "p";
    case CoordKind::qd: return "qd";
    case CoordKind::pd: return "pd";
    case CoordKind::qdd: return "qdd";
    case CoordKind::pdd: return "pdd";
  }
  return "?";
}

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
  }
  return "?";
}

double apply_func(Func f, double x) {
  switch (f) {
    case Func::sin: return std::sin(x);
    case Func::cos: return std::cos(x);
    case Func::exp: return std::exp(x);
  }
  return 0.0;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    auto c = compare(ia->first, ib->first);
    if (c < 0) {
      out.push_back(*ia++);
    } else if (c > 0) {
      out.push_back(*ib++);
    } else {
      out.emplace_back(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  out.insert(out.end(), ia, a.end());
  out.insert(out.end(), ib, b.end());
  return out;
}

std::string atom_to_string(const Atom& atom) {
  if (const auto* c = std::get_if<Coord>(&atom)) return to_string(*c);
  if (const auto* p = std::get_if<Param>(&atom)) return p->name;
  const auto& call = std::get<FuncCall>(atom);
  return std::string(func_name(call.func)) + "(" + to_string(*call.arg) + ")";
}

void collect(const Expr& e, std::set<Coord>* coords, std::set<std::string>* params) {
  for (const auto& [mono, coef] : e.terms()) {
    for (const auto& [atom, power] : mono) {
      if (const auto* c = std::get_if<Coord>(&atom)) {
        if (coords) coords->insert(*c);
      } else if (const auto* p = std::get_if<Param>(&atom)) {
        if (params) params->insert(p->name);
      } else {
        collect(*std::get<FuncCall>(atom).arg, coords, params);
      }
    }
  }
}

double coordinate_value(Coord c, const Valuation& at) {
  if (c.kind == CoordKind::t) return at.t;
  std::span<const double> values;
  switch (c.kind) {
    case CoordKind::q: values = at.q; break;
    case CoordKind::p: values = at.p; break;
    case CoordKind::qd: values = at.qd; break;
    case CoordKind::pd: values = at.pd; break;
    case CoordKind::qdd: values = at.qdd; break;
    case CoordKind::pdd: values = at.pdd; break;
    case CoordKind::t: break;
  }
  if (c.index < 1 || static_cast<std::size_t>(c.index) > values.size()) {
    throw DomainError("no value for coordinate " + to_string(c));
  }
  return values[static_cast<std::size_t>(c.index - 1)];
}

}  // namespace

std::string to_string(Coord c) {
  if (c.kind == CoordKind::t) return "t";
  return std::string(kind_prefix(c.kind)) + std::to_string(c.index);
}

std::strong_ordering compare(const Atom& a, const Atom& b) {
  if (a.index() != b.index()) return a.index() <=> b.index();
  if (const auto* ca = std::get_if<Coord>(&a)) return *ca <=> std::get<Coord>(b);
  if (const auto* pa = std::get_if<Param>(&a)) return pa->name <=> std::get<Param>(b).name;
  const auto& fa = std::get<FuncCall>(a);
  const auto& fb = std::get<FuncCall>(b);
  if (fa.func != fb.func) return fa.func <=> fb.func;
  return compare(*fa.arg, *fb.arg);
}

std::strong_ordering compare(const Monomial& a, const Monomial& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = compare(a[i].first, b[i].first); c != 0) return c;
    if (a[i].second != b[i].second) return a[i].second <=> b[i].second;
  }
  return a.size() <=> b.size();
}

std::strong_ordering compare(const Expr& a, const Expr& b) {
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
    if (auto c = compare(ia->first, ib->first); c != 0) return c;
    if (ia->second < ib->second) return std::strong_ordering::less;
    if (ia->second > ib->second) return std::strong_ordering::greater;
  }
  return a.terms().size() <=> b.terms().size();
}

bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

Expr Expr::constant(double value) {
  Expr e;
  e.add_term({}, value);
  return e;
}

Expr Expr::coordinate(Coord c) { return monomial({{Atom{c}, 1u}}, 1.0); }

Expr Expr::parameter(std::string name) { return monomial({{Atom{Param{std::move(name)}}, 1u}}, 1.0); }

Expr Expr::call(Func f, const Expr& arg) {
  if (arg.is_constant()) return constant(apply_func(f, arg.constant_term()));
  return monomial({{Atom{FuncCall{f, std::make_shared<const Expr>(arg)}}, 1u}}, 1.0);
}

Expr Expr::monomial(Monomial mono, double coefficient) {
  Expr e;
  e.add_term(mono, coefficient);
  return e;
}

bool Expr::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

double Expr::constant_term() const noexcept {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? 0.0 : it->second;
}

void Expr::add_term(const Monomial& mono, double coefficient) {
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(mono, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Expr& Expr::operator+=(const Expr& other) {
  for (const auto& [mono, coef] : other.terms_) add_term(mono, coef);
  return *this;
}

Expr& Expr::operator-=(const Expr& other) {
  for (const auto& [mono, coef] : other.terms_) add_term(mono, -coef);
  return *this;
}

Expr& Expr::operator*=(const Expr& other) {
  *this = *this * other;
  return *this;
}

Expr& Expr::operator*=(double scale) {
  if (scale == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [mono, coef] : terms_) coef *= scale;
  return *this;
}

Expr operator*(const Expr& a, const Expr& b) {
  Expr out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), ca * cb);
  }
  return out;
}

Expr pow(const Expr& base, unsigned exponent) {
  Expr result = Expr::constant(1.0);
  Expr square = base;
  while (exponent > 0) {
    if (exponent & 1u) result *= square;
    exponent >>= 1u;
    if (exponent > 0) square = square * square;
  }
  return result;
}

bool equivalent(const Expr& a, const Expr& b, double tol) {
  const Expr d = a - b;
  return std::all_of(d.terms().begin(), d.terms().end(),
                     [tol](const auto& term) { return std::abs(term.second) <= tol; });
}

Expr diff(const Expr& e, Coord wrt) {
  Expr out;
  for (const auto& [mono, coef] : e.terms()) {
    for (std::size_t i = 0; i < mono.size(); ++i) {
      const auto& [atom, power] = mono[i];
      Monomial rest = mono;
      if (power > 1) {
        rest[i].second = power - 1;
      } else {
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      }
      if (const auto* c = std::get_if<Coord>(&atom)) {
        if (*c == wrt) out += Expr::monomial(std::move(rest), coef * power);
      } else if (const auto* call = std::get_if<FuncCall>(&atom)) {
        Expr inner = diff(*call->arg, wrt);
        if (inner.is_zero()) continue;
        Expr outer;
        switch (call->func) {
          case Func::sin: outer = Expr::call(Func::cos, *call->arg); break;
          case Func::cos: outer = -Expr::call(Func::sin, *call->arg); break;
          case Func::exp: outer = Expr::call(Func::exp, *call->arg); break;
        }
        out += Expr::monomial(std::move(rest), coef * power) * outer * inner;
      }
    }
  }
  return out;
}

Expr rewrite_atoms(const Expr& e, const std::function<std::optional<Expr>(const Atom&)>& fn) {
  Expr out;
  for (const auto& [mono, coef] : e.terms()) {
    Expr term = Expr::constant(coef);
    for (const auto& [atom, power] : mono) {
      Expr factor;
      if (auto replaced = fn(atom)) {
        factor = std::move(*replaced);
      } else if (const auto* call = std::get_if<FuncCall>(&atom)) {
        factor = Expr::call(call->func, rewrite_atoms(*call->arg, fn));
      } else {
        factor = Expr::monomial({{atom, 1u}}, 1.0);
      }
      term *= pow(factor, power);
    }
    out += term;
  }
  return out;
}

Expr substitute(const Expr& e, const std::map<Coord, Expr>& replacements) {
  return rewrite_atoms(e, [&](const Atom& atom) -> std::optional<Expr> {
    if (const auto* c = std::get_if<Coord>(&atom)) {
      if (auto it = replacements.find(*c); it != replacements.end()) return it->second;
    }
    return std::nullopt;
  });
}

Expr bind(const Expr& e, const ParamMap& params) {
  return rewrite_atoms(e, [&](const Atom& atom) -> std::optional<Expr> {
    if (const auto* p = std::get_if<Param>(&atom)) {
      if (auto it = params.find(p->name); it != params.end()) return Expr::constant(it->second);
    }
    return std::nullopt;
  });
}

std::set<Coord> coordinates(const Expr& e) {
  std::set<Coord> out;
  collect(e, &out, nullptr);
  return out;
}

std::set<std::string> parameters(const Expr& e) {
  std::set<std::string> out;
  collect(e, nullptr, &out);
  return out;
}

bool depends_on(const Expr& e, CoordKind kind) {
  const auto coords = coordinates(e);
  return std::any_of(coords.begin(), coords.end(), [kind](Coord c) { return c.kind == kind; });
}

int phase_degree(const Expr& e) {
  int best = -1;
  for (const auto& [mono, coef] : e.terms()) {
    int degree = 0;
    for (const auto& [atom, power] : mono) {
      if (const auto* c = std::get_if<Coord>(&atom); c && c->kind != CoordKind::t) {
        degree += static_cast<int>(power);
      }
    }
    best = std::max(best, degree);
  }
  return best;
}

double evaluate(const Expr& e, const Valuation& at) {
  double total = 0.0;
  for (const auto& [mono, coef] : e.terms()) {
    double value = coef;
    for (const auto& [atom, power] : mono) {
      double base = 0.0;
      if (const auto* c = std::get_if<Coord>(&atom)) {
        base = coordinate_value(*c, at);
      } else if (const auto* p = std::get_if<Param>(&atom)) {
        if (at.params == nullptr) throw DomainError("unbound parameter " + p->name);
        auto it = at.params->find(p->name);
        if (it == at.params->end()) throw DomainError("unbound parameter " + p->name);
        base = it->second;
      } else {
        const auto& call = std::get<FuncCall>(atom);
        base = apply_func(call.func, evaluate(*call.arg, at));
      }
      double factor = base;
      for (unsigned k = 1; k < power; ++k) factor *= base;
      value *= factor;
    }
    total += value;
  }
  return total;
}

std::string to_string(const Expr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [mono, coef] : e.terms()) {
    const double magnitude = std::abs(coef);
    if (first) {
      if (coef < 0) out += "-";
    } else {
      out += coef < 0 ? " - " : " + ";
    }
    first = false;
    bool need_star = false;
    if (mono.empty() || magnitude != 1.0) {
      out += format_number(magnitude);
      need_star = true;
    }
    for (const auto& [atom, power] : mono) {
      if (need_star) out += "*";
      out += atom_to_string(atom);
      if (power > 1) out += "^" + std::to_string(power);
      need_star = true;
    }
  }
  return out;
}

}  // namespace jmech
