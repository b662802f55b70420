#include "jmech/system.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "jmech/error.hpp"
#include "jmech/parser.hpp"

namespace jmech {

namespace {

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::size_t skip_spaces(std::string_view s, std::size_t i) {
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

bool valid_param_name(std::string_view name) {
  if (name.empty()) return false;
  if (!std::all_of(name.begin(), name.end(),
                   [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; })) {
    return false;
  }
  static const char* reserved[] = {"t", "q", "p", "qd", "pd", "qdd", "pdd", "sin", "cos", "exp"};
  return std::none_of(std::begin(reserved), std::end(reserved), [&](const char* r) { return name == r; });
}

}  // namespace

HamiltonianSystem::HamiltonianSystem(int dim, Expr hamiltonian, ParamMap params)
    : dim_(dim), hamiltonian_(std::move(hamiltonian)), params_(std::move(params)) {
  if (dim_ < 1) throw DomainError("dimension must be positive");
  for (Coord c : coordinates(hamiltonian_)) {
    if (c.kind != CoordKind::t && c.kind != CoordKind::q && c.kind != CoordKind::p) {
      throw DomainError("Hamiltonian may depend on t, q and p only; found " + to_string(c));
    }
    if (c.kind != CoordKind::t && (c.index < 1 || c.index > dim_)) {
      throw DomainError("coordinate " + to_string(c) + " outside dimension " + std::to_string(dim_));
    }
  }
  for (const auto& name : parameters(hamiltonian_)) {
    if (params_.count(name) == 0) throw DomainError("parameter '" + name + "' is not bound");
  }

  bound_ = jmech::bind(hamiltonian_, params_);
  const auto n = static_cast<std::size_t>(2 * dim_);
  std::vector<Coord> phase;
  for (int k = 1; k <= dim_; ++k) phase.push_back(Coord::q(k));
  for (int k = 1; k <= dim_; ++k) phase.push_back(Coord::p(k));
  gradient_.reserve(n);
  for (Coord c : phase) gradient_.push_back(diff(bound_, c));
  hessian_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      hessian_[i * n + j] = diff(gradient_[i], phase[j]);
      hessian_[j * n + i] = hessian_[i * n + j];
    }
  }
}

std::size_t HamiltonianSystem::slot(Coord c) const {
  if (c.index < 1 || c.index > dim_) throw DomainError("coordinate index out of range: " + to_string(c));
  const auto k = static_cast<std::size_t>(c.index - 1);
  if (c.kind == CoordKind::q) return k;
  if (c.kind == CoordKind::p) return static_cast<std::size_t>(dim_) + k;
  throw DomainError("not a phase coordinate: " + to_string(c));
}

const Expr& HamiltonianSystem::hessian(Coord a, Coord b) const {
  const auto n = static_cast<std::size_t>(2 * dim_);
  return hessian_[slot(a) * n + slot(b)];
}

bool HamiltonianSystem::is_separable() const noexcept {
  for (const auto& [mono, coef] : hamiltonian_.terms()) {
    bool has_p = false;
    bool has_other = false;
    for (const auto& [atom, power] : mono) {
      if (const auto* c = std::get_if<Coord>(&atom)) {
        if (c->kind == CoordKind::p) {
          has_p = true;
        } else {
          has_other = true;
        }
      } else if (std::holds_alternative<FuncCall>(atom)) {
        has_other = true;  // function atoms depend on t
      }
    }
    if (has_p && has_other) return false;
  }
  return true;
}

std::uint64_t HamiltonianSystem::hash() const noexcept {
  std::ostringstream out;
  out << "dim=" << dim_ << ";H=" << to_string(hamiltonian_);
  for (const auto& [name, value] : params_) out << ";" << name << "=" << to_string(Expr::constant(value));
  return fnv1a(out.str());
}

HamiltonianSystem parse_system(std::string_view text) {
  std::optional<int> dim;
  ParamMap params;
  std::optional<std::string> h_source;
  int h_line = 0;
  int h_column = 0;
  int line_no = 0;

  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(begin, end - begin);
    if (auto hash_pos = line.find('#'); hash_pos != std::string_view::npos) line = line.substr(0, hash_pos);
    begin = end + 1;

    std::size_t i = skip_spaces(line, 0);
    if (i >= line.size()) {
      if (end == text.size()) break;
      continue;
    }
    const auto column = [&](std::size_t at) { return static_cast<int>(at) + 1; };

    std::size_t word_end = i;
    while (word_end < line.size() && !is_space(line[word_end]) && line[word_end] != '=') ++word_end;
    const std::string_view keyword = line.substr(i, word_end - i);

    std::string_view name;
    std::size_t name_at = 0;
    std::size_t after = word_end;
    if (keyword == "param") {
      name_at = skip_spaces(line, word_end);
      std::size_t name_end = name_at;
      while (name_end < line.size() && !is_space(line[name_end]) && line[name_end] != '=') ++name_end;
      name = line.substr(name_at, name_end - name_at);
      if (!valid_param_name(name)) throw ParseError("invalid parameter name '" + std::string(name) + "'", line_no, column(name_at));
      if (params.count(std::string(name))) throw ParseError("duplicate parameter '" + std::string(name) + "'", line_no, column(name_at));
      after = name_end;
    } else if (keyword != "dim" && keyword != "H") {
      throw ParseError("expected 'dim', 'param' or 'H', found '" + std::string(keyword) + "'", line_no, column(i));
    }

    std::size_t eq = skip_spaces(line, after);
    if (eq >= line.size() || line[eq] != '=') throw ParseError("expected '='", line_no, column(eq));
    const std::size_t value_at = skip_spaces(line, eq + 1);
    std::string_view value = line.substr(value_at);
    while (!value.empty() && is_space(value.back())) value.remove_suffix(1);
    if (value.empty()) throw ParseError("missing value", line_no, column(value_at));

    if (keyword == "dim") {
      if (dim) throw ParseError("duplicate 'dim'", line_no, column(i));
      int m = 0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), m);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size() || m < 1) {
        throw ParseError("dimension must be a positive integer", line_no, column(value_at));
      }
      dim = m;
    } else if (keyword == "param") {
      double v = 0.0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        throw ParseError("malformed number", line_no, column(value_at));
      }
      params.emplace(std::string(name), v);
    } else {
      if (h_source) throw ParseError("duplicate 'H'", line_no, column(i));
      h_source = std::string(value);
      h_line = line_no;
      h_column = column(value_at);
    }
    if (end == text.size()) break;
  }

  if (!dim) throw ParseError("missing 'dim = <m>'", line_no, 1);
  if (!h_source) throw ParseError("missing 'H = <expr>'", line_no, 1);

  std::set<std::string> known;
  for (const auto& [name, v] : params) known.insert(name);
  Expr h;
  try {
    h = parse(*h_source, *dim, known);
  } catch (const ParseError& e) {
    throw ParseError(e.bare_message(), h_line + e.line() - 1, e.line() == 1 ? h_column + e.column() - 1 : e.column());
  }
  return HamiltonianSystem(*dim, std::move(h), std::move(params));
}

HamiltonianSystem load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open system file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

}  // namespace jmech
