#include "jmech/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

#include "jmech/error.hpp"

namespace jmech {

namespace {

constexpr unsigned kMaxExponent = 64;

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::optional<CoordKind> coord_prefix(std::string_view prefix) {
  if (prefix == "q") return CoordKind::q;
  if (prefix == "p") return CoordKind::p;
  if (prefix == "qd") return CoordKind::qd;
  if (prefix == "pd") return CoordKind::pd;
  if (prefix == "qdd") return CoordKind::qdd;
  if (prefix == "pdd") return CoordKind::pdd;
  return std::nullopt;
}

std::optional<Func> function_named(std::string_view name) {
  if (name == "sin") return Func::sin;
  if (name == "cos") return Func::cos;
  if (name == "exp") return Func::exp;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view src, int dim, const std::set<std::string>* known)
      : src_(src), dim_(dim), known_(known) {}

  Expr run() {
    Expr e = expr();
    skip_space();
    if (pos_ < src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message, std::size_t at) const {
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(message, line, column);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'", pos_);
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) {
        e += term();
      } else if (accept('-')) {
        e -= term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    while (accept('*')) e *= factor();
    return e;
  }

  Expr factor() {
    Expr b = base();
    if (!accept('^')) return b;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (start == pos_) fail("expected non-negative integer exponent", start);
    unsigned exponent = 0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, exponent);
    if (res.ec != std::errc() || exponent > kMaxExponent) fail("exponent out of range", start);
    return pow(b, exponent);
  }

  Expr base() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      return number();
    }
    if (is_ident_start(c)) return identifier();
    fail(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && is_digit(src_[look])) {
        pos_ = look;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    const char* first = src_.data() + start;
    if (*first == '.') {
      // from_chars rejects a leading '.'
      std::string padded = "0" + std::string(src_.substr(start, pos_ - start));
      std::from_chars(padded.data(), padded.data() + padded.size(), value);
    } else {
      auto res = std::from_chars(first, src_.data() + pos_, value);
      if (res.ec != std::errc()) fail("malformed number", start);
    }
    return Expr::constant(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (auto f = function_named(name)) {
      skip_space();
      if (pos_ >= src_.size() || src_[pos_] != '(') fail("function '" + std::string(name) + "' needs an argument", pos_);
      ++pos_;
      const std::size_t arg_start = pos_;
      Expr arg = expr();
      expect(')');
      for (Coord c : coordinates(arg)) {
        if (c.kind != CoordKind::t) {
          fail("argument of '" + std::string(name) + "' may depend on t and parameters only", arg_start);
        }
      }
      return Expr::call(*f, arg);
    }

    skip_space();
    if (pos_ < src_.size() && src_[pos_] == '(') fail("unknown function '" + std::string(name) + "'", start);

    if (name == "t") return Expr::coordinate(Coord::time());

    std::size_t digits = name.size();
    while (digits > 0 && is_digit(name[digits - 1])) --digits;
    const std::string_view prefix = name.substr(0, digits);
    if (auto kind = coord_prefix(prefix)) {
      if (digits == name.size()) fail("coordinate '" + std::string(name) + "' needs an index", start);
      int index = 0;
      auto res = std::from_chars(name.data() + digits, name.data() + name.size(), index);
      if (res.ec != std::errc() || index < 1 || index > dim_) {
        fail("index out of range in '" + std::string(name) + "' (dimension " + std::to_string(dim_) + ")", start);
      }
      return Expr::coordinate(Coord{*kind, index});
    }

    const bool plain = std::all_of(name.begin(), name.end(), [](char ch) { return is_ident_start(ch); });
    if (!plain) fail("unknown identifier '" + std::string(name) + "'", start);
    if (known_ != nullptr && known_->count(std::string(name)) == 0) {
      fail("unknown identifier '" + std::string(name) + "'", start);
    }
    return Expr::parameter(std::string(name));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int dim_;
  const std::set<std::string>* known_;
};

}  // namespace

Expr parse(std::string_view source, int dim) {
  if (dim < 1) throw DomainError("dimension must be positive");
  return Parser(source, dim, nullptr).run();
}

Expr parse(std::string_view source, int dim, const std::set<std::string>& known_params) {
  if (dim < 1) throw DomainError("dimension must be positive");
  return Parser(source, dim, &known_params).run();
}

}  // namespace jmech
