// Copyright 2026 The lyapcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lyapcert/errors.hpp"
#include "lyapcert/lyapunov.hpp"
#include "lyapcert/multi_index.hpp"
#include "lyapcert/ode.hpp"
#include "lyapcert/polynomial.hpp"
#include "lyapcert/relax.hpp"

namespace lyapcert {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Variable names

/// Declared names map to their position; x1..xn and the aliases x, y, z, w
/// (for x1..x4) are always accepted unless a declared name shadows them.
class VariableNames {
 public:
  VariableNames() = default;
  explicit VariableNames(std::vector<std::string> declared) : declared_(std::move(declared)) {}

  const std::vector<std::string>& declared() const { return declared_; }

  std::optional<std::size_t> lookup(std::string_view name) const {
    for (std::size_t i = 0; i < declared_.size(); ++i)
      if (declared_[i] == name) return i;
    if (name.size() >= 2 && name[0] == 'x' && name[1] != '0' &&
        std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      std::size_t k = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (k >= 1) return k - 1;
    }
    static constexpr std::string_view aliases = "xyzw";
    if (name.size() == 1) {
      const auto pos = aliases.find(name[0]);
      if (pos != std::string_view::npos) return pos;
    }
    return std::nullopt;
  }

  std::string name(std::size_t i) const {
    if (i < declared_.size()) return declared_[i];
    return "x" + std::to_string(i + 1);
  }

 private:
  std::vector<std::string> declared_;
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Polynomial parsing

namespace detail {

struct Token {
  enum Kind { Number, Variable, Plus, Minus, Star, Slash, Caret, LParen, RParen, End } kind;
  std::size_t pos = 0;
  double value = 0.0;
  std::size_t var = 0;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Splits an identifier into known names, longest prefix first ("xy" → x, y).
inline std::vector<std::size_t> split_identifier(std::string_view id, std::size_t pos, const VariableNames& names) {
  if (auto v = names.lookup(id)) return {*v};
  std::vector<std::size_t> out;
  std::size_t at = 0;
  while (at < id.size()) {
    std::size_t len = id.size() - at;
    std::optional<std::size_t> hit;
    for (; len > 0; --len) {
      const std::string_view part = id.substr(at, len);
      // a canonical name must not be cut inside its digit run
      if (at + len < id.size() && std::isdigit(static_cast<unsigned char>(id[at + len])) &&
          std::isdigit(static_cast<unsigned char>(id[at + len - 1])))
        continue;
      if ((hit = names.lookup(part))) break;
    }
    if (!hit) throw ParseError("undeclared variable '" + std::string(id) + "'", pos + at);
    out.push_back(*hit);
    at += len;
  }
  return out;
}

inline std::vector<Token> tokenize(std::string_view s, const VariableNames& names) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      const auto res = std::from_chars(s.data() + i, s.data() + j, t.value);
      if (res.ec != std::errc() || res.ptr != s.data() + j) throw ParseError("malformed number", i);
      t.kind = Token::Number;
      out.push_back(t);
      i = j;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      for (std::size_t v : split_identifier(s.substr(i, j - i), i, names)) {
        t.kind = Token::Variable;
        t.var = v;
        out.push_back(t);
      }
      i = j;
      continue;
    }
    switch (c) {
      case '+': t.kind = Token::Plus; break;
      case '-': t.kind = Token::Minus; break;
      case '/': t.kind = Token::Slash; break;
      case '^': t.kind = Token::Caret; break;
      case '(': t.kind = Token::LParen; break;
      case ')': t.kind = Token::RParen; break;
      case '*':
        if (i + 1 < s.size() && s[i + 1] == '*') {
          t.kind = Token::Caret;
          ++i;
        } else {
          t.kind = Token::Star;
        }
        break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back(t);
    ++i;
  }
  out.push_back({Token::End, s.size(), 0.0, 0});
  return out;
}

class PolynomialParser {
 public:
  PolynomialParser(std::vector<Token> toks, std::size_t n) : toks_(std::move(toks)), n_(n) {}

  Polynomial<double> parse() {
    if (peek().kind == Token::End) throw ParseError("empty expression", peek().pos);
    Polynomial<double> p = expr();
    if (peek().kind != Token::End) throw ParseError("unexpected token", peek().pos);
    return p;
  }

 private:
  const Token& peek() const { return toks_[at_]; }
  const Token& next() { return toks_[at_++]; }

  Polynomial<double> expr() {
    Polynomial<double> p = term();
    while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
      const bool minus = next().kind == Token::Minus;
      Polynomial<double> t = term();
      if (minus) p -= t;
      else p += t;
    }
    return p;
  }

  static bool starts_factor(Token::Kind k) {
    return k == Token::Number || k == Token::Variable || k == Token::LParen;
  }

  Polynomial<double> term() {
    Polynomial<double> p = unary();
    for (;;) {
      const Token::Kind k = peek().kind;
      if (k == Token::Star) {
        next();
        p = p * unary();
      } else if (k == Token::Slash) {
        const std::size_t pos = next().pos;
        const Polynomial<double> d = unary();
        const MultiIndex zero(n_);
        if (d.size() > 1 || (d.size() == 1 && d.terms().begin()->first != zero))
          throw ParseError("division by a non-constant expression", pos);
        const double v = d.coeff(zero);
        if (v == 0.0) throw ParseError("division by zero", pos);
        p *= 1.0 / v;
      } else if (starts_factor(k)) {
        p = p * power();
      } else {
        return p;
      }
    }
  }

  Polynomial<double> unary() {
    if (peek().kind == Token::Minus) {
      next();
      return -unary();
    }
    if (peek().kind == Token::Plus) {
      next();
      return unary();
    }
    return power();
  }

  Polynomial<double> power() {
    Polynomial<double> base = atom();
    if (peek().kind == Token::Caret) {
      next();
      const Token& e = next();
      if (e.kind != Token::Number || e.value != std::floor(e.value) || e.value < 0 || e.value > 1000)
        throw ParseError("exponent must be a non-negative integer", e.pos);
      base = base.pow(static_cast<int>(e.value));
    }
    return base;
  }

  Polynomial<double> atom() {
    const Token& t = next();
    switch (t.kind) {
      case Token::Number: return Polynomial<double>::constant(n_, t.value);
      case Token::Variable:
        if (t.var >= n_) throw ParseError("undeclared variable x" + std::to_string(t.var + 1), t.pos);
        return Polynomial<double>::variable(n_, t.var);
      case Token::LParen: {
        Polynomial<double> p = expr();
        if (next().kind != Token::RParen) throw ParseError("expected ')'", toks_[at_ - 1].pos);
        return p;
      }
      case Token::End: throw ParseError("unexpected end of expression", t.pos);
      default: throw ParseError("unexpected token", t.pos);
    }
  }

  std::vector<Token> toks_;
  std::size_t n_;
  std::size_t at_ = 0;
};

}  // namespace detail

/// Parses with exactly n variables.
inline Polynomial<double> parse_polynomial(std::string_view text, std::size_t n, const VariableNames& names = {}) {
  return detail::PolynomialParser(detail::tokenize(text, names), n).parse();
}

/// Parses with n taken from the highest variable used (at least 1).
inline Polynomial<double> parse_polynomial(std::string_view text) {
  const auto toks = detail::tokenize(text, {});
  std::size_t n = 1;
  for (const auto& t : toks)
    if (t.kind == detail::Token::Variable) n = std::max(n, t.var + 1);
  return detail::PolynomialParser(toks, n).parse();
}

// ---------------------------------------------------------------------------
// Printing

struct FormatOptions {
  double prune = 0.0;  // drop terms with |c| ≤ prune
  int digits = 0;      // 0: round-trip precision, otherwise significant digits
  bool explicit_star = true;
};

inline std::string format_polynomial(const Polynomial<double>& p, const VariableNames& names = {},
                                     const FormatOptions& opt = {}) {
  // highest degree first; x1² before x1x2 within a degree
  std::vector<std::pair<MultiIndex, double>> terms(p.terms().begin(), p.terms().end());
  std::stable_sort(terms.begin(), terms.end(),
                   [](const auto& a, const auto& b) { return a.first.total_degree() > b.first.total_degree(); });
  std::string out;
  for (const auto& [I, c] : terms) {
    if (std::fabs(c) <= opt.prune) continue;
    double a = std::fabs(c);
    std::string num;
    if (opt.digits > 0) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.*g", opt.digits, a);
      num = buf;
    } else {
      num = format_number(a);
    }
    std::string mono;
    for (std::size_t j = 0; j < I.size(); ++j) {
      if (I[j] == 0) continue;
      if (!mono.empty() && opt.explicit_star) mono += '*';
      mono += names.name(j);
      if (I[j] > 1) mono += '^' + std::to_string(I[j]);
    }
    std::string t;
    if (mono.empty()) t = num;
    else if (num == "1") t = mono;
    else t = num + (opt.explicit_star ? "*" : "") + mono;
    if (out.empty()) out = (c < 0 ? "-" : "") + t;
    else out += (c < 0 ? " - " : " + ") + t;
  }
  return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// System files

struct SystemSpec {
  std::vector<std::string> names;
  OdeSystem system;
  Box region;
  bool region_given = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view s, std::size_t pos) {
  s = trim(s);
  const auto p = parse_polynomial(s, 1);
  if (p.size() > 1 || (p.size() == 1 && p.terms().begin()->first.total_degree() != 0))
    throw ParseError("expected a number", pos);
  return p.coeff(MultiIndex(1));
}

/// "[a,b]" at the start of s; returns the bounds and the consumed length.
inline std::pair<std::pair<double, double>, std::size_t> parse_interval(std::string_view s, std::size_t pos) {
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  if (i >= s.size() || s[i] != '[') throw ParseError("expected '['", pos + i);
  const auto comma = s.find(',', i);
  const auto close = s.find(']', i);
  if (comma == std::string_view::npos || close == std::string_view::npos || comma > close)
    throw ParseError("expected an interval [lo,hi]", pos + i);
  const double lo = parse_real(s.substr(i + 1, comma - i - 1), pos + i + 1);
  const double hi = parse_real(s.substr(comma + 1, close - comma - 1), pos + comma + 1);
  return {{lo, hi}, close + 1};
}

}  // namespace detail

/// "[a,b]", "[a,b]^n" or "[a,b]x[c,d]x...".
inline Box parse_box(std::string_view text) {
  std::vector<double> lo, hi;
  std::size_t i = 0;
  for (;;) {
    auto [iv, used] = detail::parse_interval(text.substr(i), i);
    lo.push_back(iv.first);
    hi.push_back(iv.second);
    i += used;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    if (text[i] == '^') {
      const double k = detail::parse_real(text.substr(i + 1), i + 1);
      if (lo.size() != 1 || k < 1 || k != std::floor(k)) throw ParseError("malformed box power", i);
      lo.assign(static_cast<std::size_t>(k), lo[0]);
      hi.assign(static_cast<std::size_t>(k), hi[0]);
      break;
    }
    if (text[i] != 'x' && text[i] != '*') throw ParseError("expected 'x' between intervals", i);
    ++i;
  }
  if (lo.empty()) throw ParseError("empty box", 0);
  for (std::size_t j = 0; j < lo.size(); ++j)
    if (!(lo[j] < hi[j])) throw ParseError("box interval must satisfy lo < hi", 0);
  return Box(lo, hi);
}

/// Parses a system file: `vars ...;`, one `dv/dt = expr;` per variable,
/// optional `region [lo,hi]^n;`, `region [a,b] x [c,d];` or
/// `region v in [lo,hi];`.  `#` starts a comment; `;` or a newline ends a
/// statement.
inline SystemSpec parse_system(std::string_view text) {
  struct Stmt {
    std::string_view body;
    std::size_t pos;
  };
  std::vector<Stmt> stmts;
  {
    std::size_t start = 0;
    bool comment = false;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      const char c = i < text.size() ? text[i] : '\n';
      if (c == '#') comment = true;
      if (c == '\n' || (c == ';' && !comment)) {
        const std::string_view raw = text.substr(start, i - start);
        const std::string_view body = raw.substr(0, raw.find('#'));
        if (!detail::trim(body).empty()) stmts.push_back({body, start});
        start = i + 1;
        if (c == '\n') comment = false;
      }
    }
  }
  SystemSpec spec;
  bool have_vars = false;
  std::vector<std::optional<std::pair<std::string, std::size_t>>> rhs_text;
  std::vector<std::optional<std::pair<double, double>>> bounds;
  std::optional<std::pair<double, double>> cube;
  std::vector<std::pair<double, double>> product;

  auto var_index = [&](std::string_view name, std::size_t pos) {
    for (std::size_t i = 0; i < spec.names.size(); ++i)
      if (spec.names[i] == name) return i;
    throw ParseError("undeclared variable '" + std::string(name) + "'", pos);
  };

  for (const auto& st : stmts) {
    std::string_view s = st.body;
    std::size_t lead = 0;
    while (lead < s.size() && std::isspace(static_cast<unsigned char>(s[lead]))) ++lead;
    const std::size_t pos = st.pos + lead;
    s = detail::trim(s);
    if (s.rfind("vars", 0) == 0 && (s.size() == 4 || !detail::ident_char(s[4]))) {
      if (have_vars) throw ParseError("duplicate vars declaration", pos);
      have_vars = true;
      std::string cur;
      for (char c : s.substr(4)) {
        if (detail::ident_char(c)) {
          cur += c;
        } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
          if (!cur.empty()) spec.names.push_back(std::exchange(cur, {}));
        } else {
          throw ParseError(std::string("unexpected character '") + c + "' in vars", pos);
        }
      }
      if (!cur.empty()) spec.names.push_back(cur);
      if (spec.names.empty()) throw ParseError("vars declares no variables", pos);
      for (std::size_t i = 0; i < spec.names.size(); ++i) {
        if (!detail::ident_start(spec.names[i][0])) throw ParseError("invalid variable name", pos);
        for (std::size_t j = 0; j < i; ++j)
          if (spec.names[i] == spec.names[j]) throw ParseError("duplicate variable '" + spec.names[i] + "'", pos);
      }
      rhs_text.assign(spec.names.size(), std::nullopt);
      bounds.assign(spec.names.size(), std::nullopt);
      continue;
    }
    if (!have_vars) throw ParseError("expected 'vars' declaration first", pos);
    if (s.rfind("region", 0) == 0 && (s.size() == 6 || !detail::ident_char(s[6]))) {
      std::string_view r = s.substr(6);
      std::size_t off = pos + 6;
      const std::string_view rt = detail::trim(r);
      if (!rt.empty() && rt.front() == '[') {
        // cube or product form
        std::size_t i = 0;
        std::vector<std::pair<double, double>> items;
        for (;;) {
          auto [iv, used] = detail::parse_interval(r.substr(i), off + i);
          items.push_back(iv);
          i += used;
          while (i < r.size() && std::isspace(static_cast<unsigned char>(r[i]))) ++i;
          if (i < r.size() && r[i] == '^') {
            const std::size_t k = static_cast<std::size_t>(detail::parse_real(r.substr(i + 1), off + i + 1));
            if (items.size() != 1 || k != spec.names.size())
              throw ParseError("region power must equal the number of variables", off + i);
            cube = items.front();
            break;
          }
          if (i >= r.size()) {
            if (items.size() == 1 && spec.names.size() == 1) {
              cube = items.front();
            } else if (items.size() != spec.names.size()) {
              throw ParseError("region has the wrong number of intervals", off);
            } else {
              product = items;
            }
            break;
          }
          if (r[i] != 'x' && r[i] != '*') throw ParseError("expected 'x' between intervals", off + i);
          ++i;
        }
      } else {
        // v in [a,b] (comma separated)
        std::size_t i = 0;
        while (i < r.size()) {
          while (i < r.size() && (std::isspace(static_cast<unsigned char>(r[i])) || r[i] == ',')) ++i;
          if (i >= r.size()) break;
          std::size_t j = i;
          while (j < r.size() && detail::ident_char(r[j])) ++j;
          const std::size_t v = var_index(r.substr(i, j - i), off + i);
          while (j < r.size() && std::isspace(static_cast<unsigned char>(r[j]))) ++j;
          if (r.substr(j, 2) != "in") throw ParseError("expected 'in'", off + j);
          auto [iv, used] = detail::parse_interval(r.substr(j + 2), off + j + 2);
          bounds[v] = iv;
          i = j + 2 + used;
        }
      }
      spec.region_given = true;
      continue;
    }
    // dv/dt = expr
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError("unrecognised statement", pos);
    const std::string_view lhs = detail::trim(s.substr(0, eq));
    std::string_view name;
    if (lhs.size() > 4 && lhs[0] == 'd' && lhs.substr(lhs.size() - 3) == "/dt") {
      name = lhs.substr(1, lhs.size() - 4);
    } else if (lhs.size() > 1 && lhs.back() == '\'') {
      name = lhs.substr(0, lhs.size() - 1);
    } else {
      throw ParseError("expected 'dv/dt = ...'", pos);
    }
    const std::size_t v = var_index(detail::trim(name), pos);
    if (rhs_text[v]) throw ParseError("duplicate equation for '" + spec.names[v] + "'", pos);
    rhs_text[v] = std::make_pair(std::string(s.substr(eq + 1)), pos + eq + 1);
  }
  if (!have_vars) throw ParseError("missing 'vars' declaration", 0);
  const std::size_t n = spec.names.size();
  const VariableNames names(spec.names);
  std::vector<Polynomial<double>> rhs;
  for (std::size_t v = 0; v < n; ++v) {
    if (!rhs_text[v]) throw ParseError("missing equation for '" + spec.names[v] + "'", text.size());
    try {
      rhs.push_back(parse_polynomial(rhs_text[v]->first, n, names));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), rhs_text[v]->second + e.position());
    }
  }
  spec.system = OdeSystem(std::move(rhs));
  std::vector<double> lo(n, -1.0), hi(n, 1.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (cube) std::tie(lo[v], hi[v]) = *cube;
    if (!product.empty()) std::tie(lo[v], hi[v]) = product[v];
    if (bounds[v]) std::tie(lo[v], hi[v]) = *bounds[v];
  }
  spec.region = Box(lo, hi);
  return spec;
}

inline std::string format_system(const SystemSpec& spec) {
  std::ostringstream os;
  const VariableNames names(spec.names);
  os << "vars";
  for (const auto& v : spec.names) os << ' ' << v;
  os << ";\n";
  for (std::size_t j = 0; j < spec.system.n(); ++j)
    os << 'd' << spec.names[j] << "/dt = " << format_polynomial(spec.system[j], names) << ";\n";
  const Box& r = spec.region;
  bool cube = true;
  for (std::size_t j = 1; j < r.dim(); ++j) cube = cube && r.lower[j] == r.lower[0] && r.upper[j] == r.upper[0];
  if (cube) {
    os << "region [" << format_number(r.lower[0]) << ',' << format_number(r.upper[0]) << "]^" << r.dim() << ";\n";
  } else {
    os << "region";
    for (std::size_t j = 0; j < r.dim(); ++j)
      os << (j ? ", " : " ") << spec.names[j] << " in [" << format_number(r.lower[j]) << ','
         << format_number(r.upper[j]) << ']';
    os << ";\n";
  }
  return os.str();
}

/// Default names x1..xn for a system without declarations.
inline SystemSpec make_system_spec(OdeSystem sys, std::optional<Box> region = std::nullopt) {
  SystemSpec spec;
  for (std::size_t j = 0; j < sys.n(); ++j) spec.names.push_back("x" + std::to_string(j + 1));
  spec.region = region ? *region : Box::cube(sys.n(), -1.0, 1.0);
  spec.region_given = region.has_value();
  spec.system = std::move(sys);
  return spec;
}

/// FNV-1a over the canonical system text.
inline std::string system_hash(const SystemSpec& spec) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : format_system(spec)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// JSON

inline Json to_json(const Polynomial<double>& p) {
  Json terms = Json::array();
  for (const auto& [I, c] : p.terms()) terms.push_back({{"exponents", I.entries()}, {"coefficient", c}});
  return {{"n", p.n()}, {"terms", terms}};
}

inline Polynomial<double> polynomial_from_json(const Json& j) {
  const std::size_t n = j.at("n").get<std::size_t>();
  Polynomial<double> p(n);
  for (const auto& t : j.at("terms")) {
    const auto e = t.at("exponents").get<std::vector<int>>();
    if (e.size() != n) throw DimensionError("term exponent length differs from n");
    p.add_term(MultiIndex(e), t.at("coefficient").get<double>());
  }
  return p;
}

inline Json to_json(const Box& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

inline Box box_from_json(const Json& j) {
  return Box(j.at("lower").get<std::vector<double>>(), j.at("upper").get<std::vector<double>>());
}

inline Json to_json(const RelaxMethod& m) {
  Json j = {{"kind", to_string(m.kind)},
            {"levels", m.levels == RecurrenceLevels::Full ? "full" : "fixed-level-1"},
            {"handelman_degree", m.handelman_degree},
            {"interval_bounds", m.interval_bounds}};
  j["degree"] = m.degree ? Json(m.degree->entries()) : Json(nullptr);
  return j;
}

inline RelaxKind relax_kind_from_string(std::string_view s) {
  if (s == "interval") return RelaxKind::Interval;
  if (s == "handelman") return RelaxKind::Handelman;
  if (s == "lp1") return RelaxKind::LP1;
  if (s == "lp2") return RelaxKind::LP2;
  if (s == "lp3" || s == "lp3-full") return RelaxKind::LP3;
  throw ParseError("unknown relaxation '" + std::string(s) + "'", 0);
}

inline RelaxMethod method_from_json(const Json& j) {
  RelaxMethod m = RelaxMethod::make(relax_kind_from_string(j.at("kind").get<std::string>()));
  m.levels = j.value("levels", std::string("fixed-level-1")) == "full" ? RecurrenceLevels::Full
                                                                       : RecurrenceLevels::FixedLevel1;
  m.handelman_degree = j.value("handelman_degree", 2);
  m.interval_bounds = j.value("interval_bounds", false);
  if (j.contains("degree") && !j["degree"].is_null()) m.degree = MultiIndex(j["degree"].get<std::vector<int>>());
  return m;
}

inline Json to_json(const PositivityCertificate& c) {
  Json hs = Json::array();
  for (const auto& h : c.halfspaces) hs.push_back(to_json(h));
  Json pp = Json::array();
  for (const auto& e : c.power_products) pp.push_back(e.entries());
  return {{"method", to_json(c.method)},
          {"box", to_json(c.box)},
          {"margin", c.margin},
          {"tolerance", c.tolerance},
          {"lower_bound", c.lower_bound},
          {"bernstein_coeffs", c.bernstein_coeffs},
          {"multipliers", c.multipliers},
          {"power_products", pp},
          {"halfspaces", hs}};
}

inline PositivityCertificate certificate_from_json(const Json& j) {
  PositivityCertificate c;
  c.method = method_from_json(j.at("method"));
  c.box = box_from_json(j.at("box"));
  c.margin = j.value("margin", 0.0);
  c.tolerance = j.value("tolerance", 1e-9);
  c.lower_bound = j.value("lower_bound", 0.0);
  c.bernstein_coeffs = j.value("bernstein_coeffs", std::vector<double>{});
  c.multipliers = j.value("multipliers", std::vector<double>{});
  if (j.contains("power_products"))
    for (const auto& e : j["power_products"]) c.power_products.emplace_back(e.get<std::vector<int>>());
  if (j.contains("halfspaces"))
    for (const auto& h : j["halfspaces"]) c.halfspaces.push_back(polynomial_from_json(h));
  return c;
}

/// Standalone certificate document: the polynomial and its certificate.
inline Json certificate_document(const Polynomial<double>& p, const PositivityCertificate& c) {
  return {{"type", "positivity_certificate"},
          {"polynomial", to_json(p)},
          {"polynomial_text", format_polynomial(p)},
          {"certificate", to_json(c)}};
}

inline Json to_json(const SystemSpec& spec) {
  Json rhs = Json::array();
  for (const auto& f : spec.system.rhs()) rhs.push_back(to_json(f));
  return {{"vars", spec.names}, {"rhs", rhs}, {"region", to_json(spec.region)}};
}

inline SystemSpec system_from_json(const Json& j) {
  SystemSpec spec;
  spec.names = j.at("vars").get<std::vector<std::string>>();
  std::vector<Polynomial<double>> rhs;
  for (const auto& f : j.at("rhs")) rhs.push_back(polynomial_from_json(f));
  spec.system = OdeSystem(std::move(rhs));
  spec.region = box_from_json(j.at("region"));
  spec.region_given = true;
  return spec;
}

inline Json to_json(const LyapunovResult& r, const SystemSpec& spec) {
  const VariableNames names(spec.names);
  Json certs = Json::array();
  for (const auto& c : r.certificates) certs.push_back(to_json(c));
  Json refinements = Json::array();
  for (const auto& y : r.refinement_points) refinements.push_back(y);
  Json pos = {{"passed", r.positivity.passed}, {"route", r.positivity.route}};
  if (r.positivity.witness) {
    pos["witness"] = *r.positivity.witness;
    pos["witness_value"] = r.positivity.witness_value;
  }
  Json monomials = Json::array();
  for (const auto& m : r.monomials) monomials.push_back(m.entries());
  Json facets = Json::array();
  for (const auto& f : r.cell_facets)
    facets.push_back(f ? Json{{"axis", f->axis}, {"value", f->value}} : Json(nullptr));
  return {{"type", "lyapunov_result"},
          {"system_hash", system_hash(spec)},
          {"system", to_json(spec)},
          {"region", to_json(spec.region)},
          {"status", to_string(r.status)},
          {"failure", r.failure},
          {"template_degree", r.template_degree},
          {"method", r.method},
          {"cells", r.cells},
          {"degree", r.degree.entries()},
          {"V", to_json(r.V)},
          {"V_text", format_polynomial(r.V, names)},
          {"coefficients", r.c},
          {"monomials", monomials},
          {"epsilon", r.epsilon},
          {"shift_power", r.shift_power},
          {"strong", r.strong},
          {"scheme", r.scheme == CellScheme::Radial ? "radial" : "orthant"},
          {"certificates", certs},
          {"facets", facets},
          {"positivity", pos},
          {"refinements", refinements},
          {"timings", {{"setup_ms", r.setup_ms}, {"lp_ms", r.lp_ms}}},
          {"diagnostics", r.diagnostics}};
}

inline LyapunovStatus lyapunov_status_from_string(std::string_view s) {
  if (s == "found") return LyapunovStatus::Found;
  if (s == "inconclusive") return LyapunovStatus::Inconclusive;
  return LyapunovStatus::NotFound;
}

inline std::pair<LyapunovResult, SystemSpec> lyapunov_result_from_json(const Json& j) {
  LyapunovResult r;
  SystemSpec spec = system_from_json(j.at("system"));
  r.status = lyapunov_status_from_string(j.at("status").get<std::string>());
  r.failure = j.value("failure", std::string{});
  r.template_degree = j.value("template_degree", 2);
  r.method = j.value("method", std::string{});
  r.cells = j.value("cells", std::size_t{0});
  r.degree = MultiIndex(j.at("degree").get<std::vector<int>>());
  r.V = polynomial_from_json(j.at("V"));
  r.c = j.value("coefficients", std::vector<double>{});
  r.epsilon = j.at("epsilon").get<double>();
  r.shift_power = j.value("shift_power", 1);
  r.strong = j.value("strong", r.epsilon > 0.0);
  r.scheme = j.value("scheme", std::string("orthant")) == "radial" ? CellScheme::Radial : CellScheme::Orthant;
  for (const auto& c : j.at("certificates")) r.certificates.push_back(certificate_from_json(c));
  for (const auto& f : j.value("facets", Json::array())) {
    if (f.is_null()) r.cell_facets.emplace_back();
    else r.cell_facets.push_back(Facet{f.at("axis").get<std::size_t>(), f.at("value").get<double>()});
  }
  if (!r.cell_facets.empty() && r.cell_facets.size() != r.certificates.size())
    throw ParseError("facet list does not match the certificates", 0);
  const Json& pos = j.at("positivity");
  r.positivity.passed = pos.value("passed", false);
  r.positivity.route = pos.value("route", std::string{});
  if (pos.contains("witness")) r.positivity.witness = pos["witness"].get<std::vector<double>>();
  for (const auto& y : j.value("refinements", Json::array())) r.refinement_points.push_back(y.get<std::vector<double>>());
  r.setup_ms = j.at("timings").value("setup_ms", 0.0);
  r.lp_ms = j.at("timings").value("lp_ms", 0.0);
  return {std::move(r), std::move(spec)};
}

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { Json, Text };

struct ReportRow {
  std::string name;
  LyapunovResult result;
  SystemSpec system;
};

namespace detail {

inline std::size_t display_width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++w;
  return w;
}

inline std::string pad(const std::string& s, std::size_t w) {
  const std::size_t d = display_width(s);
  return d >= w ? s : s + std::string(w - d, ' ');
}

inline std::string seconds(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms / 1000.0);
  return buf;
}

}  // namespace detail

/// One row per result.  Text columns: Relaxation | Lyapunov | #Boxes |
/// Setup | LPTime (seconds).
inline std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat fmt) {
  if (fmt == ReportFormat::Json) {
    Json arr = Json::array();
    for (const auto& row : rows) {
      Json j = to_json(row.result, row.system);
      j["name"] = row.name;
      arr.push_back(std::move(j));
    }
    return arr.dump(2);
  }
  const bool named = std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.name.empty(); });
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> head = {"Relaxation", "Lyapunov", "#Boxes", "Setup", "LPTime"};
  if (named) head.insert(head.begin(), "System");
  table.push_back(head);
  for (const auto& row : rows) {
    const LyapunovResult& r = row.result;
    std::string lyap;
    if (r.found()) {
      FormatOptions fo;
      fo.prune = 1e-6;
      fo.digits = 4;
      fo.explicit_star = false;
      lyap = format_polynomial(r.V, VariableNames(row.system.names), fo);
      if (!r.strong) lyap += " (weak)";
    } else {
      lyap = "✗";
      if (!r.failure.empty()) lyap += " (" + r.failure + ")";
    }
    std::vector<std::string> line = {r.method, lyap, std::to_string(r.cells), detail::seconds(r.setup_ms),
                                     detail::seconds(r.lp_ms)};
    if (named) line.insert(line.begin(), row.name);
    table.push_back(std::move(line));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : table)
    for (std::size_t k = 0; k < line.size(); ++k) width[k] = std::max(width[k], detail::display_width(line[k]));
  std::string out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t k = 0; k < table[i].size(); ++k) {
      if (k) out += " | ";
      out += k + 1 == table[i].size() ? table[i][k] : detail::pad(table[i][k], width[k]);
    }
    out += '\n';
    if (i == 0) {
      for (std::size_t k = 0; k < width.size(); ++k) {
        if (k) out += "-+-";
        out += std::string(width[k], '-');
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace lyapcert
