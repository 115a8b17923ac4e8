/*
 * Copyright (C) 2026 The ypnosc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Program files:
//
//   -- line comment
//   dimensions X, Y;
//   stencil laplace2D = fun X*Y:| _  t  _ |
//                              | l @c  r |
//                              | _  b  _ | -> t + l + r + b - 4.0*c;
//   boundary zero : Double = from (-1, -1) to (+1, +1) -> 0.0;
//
// Grid patterns come in three shapes: 1D (`X:| l @c r |`), flat 2D
// (`X*Y:| .. | | .. |`, columns step X, rows step Y) and nested 1D patterns
// (`Y:| X:| .. | @X:| .. | X:| .. | |`), where the outer offset becomes the
// outer dimension's component. Boundary clauses follow the grammar
//
//   B ::= from I to I -> e  |  I -> e  |  I g -> e
//   I ::= P | (P, ..., P)        P ::= -n | +n | *v

#ifndef YPNOS_SYNTAX_HPP
#define YPNOS_SYNTAX_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ypnos/boundary.hpp"
#include "ypnos/core.hpp"
#include "ypnos/expr.hpp"

namespace ypnos {

// ---------------------------------------------------------------------------
// Stencil definitions
// ---------------------------------------------------------------------------

/// A desugared grid pattern plus body. `bindings` maps each pattern variable to
/// its cursor-relative offset; `accessSet` is the set of those offsets.
struct StencilDef {
  DimSpec dims;
  std::map<std::string, RelIndex> bindings;
  std::set<RelIndex> accessSet;
  Expr body;

  std::vector<std::string> slotNames() const {
    std::vector<std::string> names;
    for (const auto& [n, _] : bindings) names.push_back(n);
    return names;
  }
};

inline bool stencilEqual(const StencilDef& a, const StencilDef& b) {
  bool bodies = (!a.body && !b.body) || (a.body && b.body && exprEqual(a.body, b.body));
  return a.dims == b.dims && a.bindings == b.bindings && a.accessSet == b.accessSet && bodies;
}

// ---------------------------------------------------------------------------
// Pattern trees
// ---------------------------------------------------------------------------

struct Pattern1D;

/// `x` binds a variable, `_` (nullopt) ignores the cell.
struct PatternLeaf {
  std::optional<std::string> var;
};

struct PatternElement {
  bool cursor = false;
  std::variant<PatternLeaf, std::shared_ptr<const Pattern1D>> item;
};

struct Pattern1D {
  std::string dim;
  std::vector<PatternElement> elems;
};

struct PatternCell {
  bool cursor = false;
  PatternLeaf leaf;
};

struct Pattern2D {
  std::string colDim;  // first-named: steps along a row
  std::string rowDim;  // second-named: steps between rows
  std::vector<std::vector<PatternCell>> rows;
};

using GridPattern = std::variant<Pattern1D, Pattern2D>;

namespace detail {

struct Desugared {
  std::vector<std::string> dims;  // innermost first
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> bindings;
};

inline std::size_t findCursor(std::size_t markers, std::size_t position, const std::string& dim) {
  if (markers == 0)
    throw Error(ErrorKind::MissingCursor, "pattern on " + dim + " has no @-marked element");
  if (markers > 1)
    throw Error(ErrorKind::MultipleCursors,
                "pattern on " + dim + " has " + std::to_string(markers) + " @-marked elements");
  return position;
}

inline Desugared desugar1D(const Pattern1D& p) {
  std::size_t markers = 0, cursorPos = 0;
  for (std::size_t i = 0; i < p.elems.size(); ++i)
    if (p.elems[i].cursor) ++markers, cursorPos = i;
  findCursor(markers, cursorPos, p.dim);

  bool hasNested = false, hasVar = false;
  for (const auto& e : p.elems) {
    if (std::holds_alternative<std::shared_ptr<const Pattern1D>>(e.item)) hasNested = true;
    else if (std::get<PatternLeaf>(e.item).var) hasVar = true;
  }
  if (hasNested && hasVar)
    throw Error(ErrorKind::SyntaxError,
                "pattern on " + p.dim + " mixes variables with nested patterns");

  Desugared out;
  std::optional<std::vector<std::string>> innerDims;
  for (std::size_t i = 0; i < p.elems.size(); ++i) {
    std::int64_t offset = static_cast<std::int64_t>(i) - static_cast<std::int64_t>(cursorPos);
    const auto& e = p.elems[i];
    if (const auto* leaf = std::get_if<PatternLeaf>(&e.item)) {
      if (leaf->var) out.bindings.push_back({*leaf->var, {offset}});
      continue;
    }
    Desugared inner = desugar1D(*std::get<std::shared_ptr<const Pattern1D>>(e.item));
    if (innerDims && *innerDims != inner.dims)
      throw Error(ErrorKind::SyntaxError, "nested patterns on " + p.dim + " disagree on dimensions");
    innerDims = inner.dims;
    for (auto& [name, offs] : inner.bindings) {
      offs.push_back(offset);
      out.bindings.push_back({std::move(name), std::move(offs)});
    }
  }
  if (innerDims) out.dims = *innerDims;
  out.dims.push_back(p.dim);
  return out;
}

inline Desugared desugar2D(const Pattern2D& p) {
  if (p.rows.empty()) throw Error(ErrorKind::MissingCursor, "empty 2D pattern");
  std::size_t width = p.rows.front().size();
  std::size_t markers = 0, cr = 0, cc = 0;
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    if (p.rows[r].size() != width) {
      throw Error(ErrorKind::RaggedRows, "row " + std::to_string(r + 1) + " has " +
                                             std::to_string(p.rows[r].size()) +
                                             " cells, expected " + std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c)
      if (p.rows[r][c].cursor) ++markers, cr = r, cc = c;
  }
  findCursor(markers, 0, p.colDim + "*" + p.rowDim);
  Desugared out;
  out.dims = {p.colDim, p.rowDim};
  for (std::size_t r = 0; r < p.rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      if (const auto& v = p.rows[r][c].leaf.var)
        out.bindings.push_back(
            {*v,
             {static_cast<std::int64_t>(c) - static_cast<std::int64_t>(cc),
              static_cast<std::int64_t>(r) - static_cast<std::int64_t>(cr)}});
  return out;
}

}  // namespace detail

/// Turns a grid pattern into cursor-relative bindings. The flat 2D form and
/// its nested equivalent yield identical definitions.
inline StencilDef desugarGridPattern(const GridPattern& pattern, Expr body = nullptr) {
  detail::Desugared d = std::visit(
      overloaded{[](const Pattern1D& p) { return detail::desugar1D(p); },
                 [](const Pattern2D& p) { return detail::desugar2D(p); }},
      pattern);
  StencilDef s;
  s.dims = DimSpec(d.dims);
  for (auto& [name, offs] : d.bindings) {
    RelIndex r = RelIndex::fromVector(offs);
    if (!s.bindings.emplace(name, r).second)
      throw Error(ErrorKind::DuplicateName, "pattern variable '" + name + "' bound twice");
    s.accessSet.insert(r);
  }
  s.body = std::move(body);
  if (s.body) {
    std::set<std::string> bound;
    for (const auto& [n, _] : s.bindings) bound.insert(n);
    checkScope(s.body, bound, std::nullopt, "stencil body");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Range-form desugaring
// ---------------------------------------------------------------------------

/// Expands `from lo to hi -> body` into specific clauses. Per dimension the
/// component set is every nonzero offset in [lo_d, hi_d], plus a wildcard when
/// the interval straddles the interior (lo_d < 0 < hi_d). The all-wildcard
/// combination is the interior itself and is dropped. First dimension varies
/// fastest; within a dimension: negatives, wildcard, positives.
inline std::vector<BoundaryClause> desugarRangeForm(const RegionDescriptor& lo,
                                                    const RegionDescriptor& hi, const Expr& body) {
  if (lo.rank() != hi.rank())
    throw Error(ErrorKind::MalformedRange, "range endpoints differ in rank");
  ExprFacts facts = exprFacts(body);
  if (!facts.freeVars.empty())
    throw Error(ErrorKind::UnboundVariable,
                "range-form body refers to '" + *facts.freeVars.begin() + "'");
  if (!facts.gridOperands.empty())
    throw Error(ErrorKind::IllegalBuiltin, "range-form bodies cannot read the grid");

  static constexpr const char* kNames[] = {"i", "j", "k"};
  std::vector<std::vector<RegionComponent>> sets(lo.rank());
  for (std::size_t d = 0; d < lo.rank(); ++d) {
    const auto* a = std::get_if<RelComponent>(&lo[d]);
    const auto* b = std::get_if<RelComponent>(&hi[d]);
    if (!a || !b) throw Error(ErrorKind::MalformedRange, "range endpoints must not use wildcards");
    if (a->offset > b->offset)
      throw Error(ErrorKind::MalformedRange, "range lower endpoint exceeds upper in dimension " +
                                                 std::to_string(d + 1));
    for (std::int64_t k = a->offset; k <= b->offset; ++k) {
      if (k == 0)
        sets[d].push_back(wildcard(kNames[d]));
      else
        sets[d].push_back(RelComponent{k});
    }
  }

  std::vector<BoundaryClause> out;
  std::vector<std::size_t> pick(lo.rank(), 0);
  for (;;) {
    std::vector<RegionComponent> comps;
    for (std::size_t d = 0; d < lo.rank(); ++d) comps.push_back(sets[d][pick[d]]);
    RegionDescriptor desc(std::move(comps));
    if (!desc.allWildcard()) out.push_back({std::move(desc), std::nullopt, body});
    std::size_t d = 0;
    while (d < pick.size() && ++pick[d] == sets[d].size()) pick[d++] = 0;
    if (d == pick.size()) break;
  }
  if (out.empty()) throw Error(ErrorKind::EmptyRange, "range expands to no regions");
  return out;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

struct Token {
  enum class Kind { Ident, Int, Float, Sym, End } kind = Kind::End;
  std::string text;
  std::int64_t intValue = 0;
  double floatValue = 0.0;
  int line = 1;
  int col = 1;
};

inline std::string where(const Token& t) {
  return std::to_string(t.line) + ":" + std::to_string(t.col);
}

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') ++line, col = 1;
      else ++col;
    }
  };
  auto isIdentStart = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto isIdentChar = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  };

  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "--") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (isIdentStart(c)) {
      std::size_t j = i;
      while (j < src.size() && isIdentChar(src[j])) ++j;
      t.text = std::string(src.substr(i, j - i));
      t.kind = t.text == "_" ? Token::Kind::Sym : Token::Kind::Ident;
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      bool isFloat = false;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        isFloat = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          isFloat = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.text = std::string(src.substr(i, j - i));
      const char* first = t.text.data();
      const char* last = first + t.text.size();
      if (isFloat) {
        t.kind = Token::Kind::Float;
        auto r = std::from_chars(first, last, t.floatValue);
        if (r.ec != std::errc{} || !std::isfinite(t.floatValue))
          throw Error(ErrorKind::SyntaxError, where(t) + ": float literal out of range: " + t.text);
      } else {
        t.kind = Token::Kind::Int;
        auto r = std::from_chars(first, last, t.intValue);
        if (r.ec != std::errc{})
          throw Error(ErrorKind::SyntaxError, where(t) + ": integer literal out of range: " + t.text);
      }
      advance(j - i);
    } else {
      static constexpr std::string_view kSyms[] = {"!!!", "->", "(", ")", ",", ";", ":", "|",
                                                   "@",   "*",  "+", "-", "/", "="};
      bool matched = false;
      for (std::string_view s : kSyms) {
        if (src.substr(i, s.size()) == s) {
          t.kind = Token::Kind::Sym;
          t.text = std::string(s);
          advance(s.size());
          matched = true;
          break;
        }
      }
      if (!matched)
        throw Error(ErrorKind::SyntaxError,
                    where(t) + ": unexpected character '" + std::string(1, c) + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Program {
  std::vector<std::string> dimensions;
  std::vector<std::pair<std::string, StencilDef>> stencils;
  std::vector<std::pair<std::string, BoundarySpec>> boundaries;

  const StencilDef& stencil(std::string_view name) const {
    for (const auto& [n, s] : stencils)
      if (n == name) return s;
    throw Error(ErrorKind::UnknownName, "no stencil named '" + std::string(name) + "'");
  }

  const BoundarySpec& boundary(std::string_view name) const {
    for (const auto& [n, b] : boundaries)
      if (n == name) return b;
    throw Error(ErrorKind::UnknownName, "no boundary named '" + std::string(name) + "'");
  }
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Program parseProgram() {
    Program prog;
    bool haveDims = false;
    std::set<std::string> names;
    auto claim = [&](const Token& at, const std::string& name) {
      if (!names.insert(name).second)
        throw Error(ErrorKind::DuplicateName, where(at) + ": '" + name + "' defined twice");
    };
    while (!atEnd()) {
      const Token& t = peek();
      if (isKeyword(t, "dimensions") || isKeyword(t, "dimension")) {
        if (haveDims)
          throw Error(ErrorKind::SyntaxError,
                      where(t) + ": dimensions must be declared in a single declaration");
        next();
        haveDims = true;
        do {
          const Token& d = expectIdent();
          if (std::find(prog.dimensions.begin(), prog.dimensions.end(), d.text) !=
              prog.dimensions.end())
            throw Error(ErrorKind::DuplicateName, where(d) + ": dimension '" + d.text + "' declared twice");
          prog.dimensions.push_back(d.text);
        } while (acceptSym(","));
        expectSym(";");
        declared_ = std::set<std::string>(prog.dimensions.begin(), prog.dimensions.end());
      } else if (isKeyword(t, "stencil")) {
        next();
        const Token& name = expectIdent();
        claim(name, name.text);
        expectSym("=");
        StencilDef s = parseFun();
        expectSym(";");
        prog.stencils.emplace_back(name.text, std::move(s));
      } else if (isKeyword(t, "boundary")) {
        next();
        const Token& name = expectIdent();
        claim(name, name.text);
        expectSym(":");
        BoundarySpec b = parseBoundaryBody();
        expectSym(";");
        prog.boundaries.emplace_back(name.text, std::move(b));
      } else {
        fail(t, "expected 'dimensions', 'stencil' or 'boundary'");
      }
    }
    if (!haveDims)
      throw Error(ErrorKind::SyntaxError, "program lacks a dimensions declaration");
    return prog;
  }

  /// `fun <pattern> -> <expr>`; the leading `fun` is optional.
  StencilDef parseFun() {
    if (isKeyword(peek(), "fun")) next();
    const Token& at = peek();
    GridPattern pat = parsePattern();
    expectSym("->");
    Expr body = parseExpr(false);
    try {
      return desugarGridPattern(pat, std::move(body));
    } catch (const Error& e) {
      throw Error(e.kind(), where(at) + ": " + stripKind(e));
    }
  }

  /// `<Type> = <clauses>` inside a program, `<Type> <clauses>` standalone.
  BoundarySpec parseBoundaryBody(bool standalone = false) {
    const Token& ty = expectIdent();
    ElemType et;
    if (ty.text == "Double") et = ElemType::Float64;
    else if (ty.text == "Int") et = ElemType::Int64;
    else fail(ty, "boundary element type must be Double or Int");
    if (!standalone) expectSym("=");

    std::vector<BoundaryClause> clauses;
    std::optional<std::size_t> rank;
    const Token& first = peek();
    do {
      const Token& at = peek();
      try {
        if (isKeyword(at, "from")) {
          next();
          RegionDescriptor lo = parseDescriptor();
          if (!isKeyword(peek(), "to")) fail(peek(), "expected 'to'");
          next();
          RegionDescriptor hi = parseDescriptor();
          expectSym("->");
          Expr body = parseExpr(true);
          checkRank(rank, lo.rank(), at);
          checkRank(rank, hi.rank(), at);
          for (auto& c : desugarRangeForm(lo, hi, body)) clauses.push_back(std::move(c));
        } else {
          RegionDescriptor d = parseDescriptor();
          std::optional<std::string> g;
          if (peek().kind == Token::Kind::Ident) g = next().text;
          expectSym("->");
          Expr body = parseExpr(true);
          checkRank(rank, d.rank(), at);
          clauses.push_back({std::move(d), std::move(g), std::move(body)});
        }
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::SyntaxError) throw;
        throw Error(e.kind(), where(at) + ": " + stripKind(e));
      }
    } while (startsClause());
    try {
      return BoundarySpec(*rank, et, std::move(clauses));
    } catch (const Error& e) {
      throw Error(e.kind(), where(first) + ": " + stripKind(e));
    }
  }

  Expr parseStandaloneExpr() {
    Expr e = parseExpr(false);
    if (!atEnd()) fail(peek(), "unexpected trailing input");
    return e;
  }

  void declareDimensions(const std::vector<std::string>& dims) {
    declared_ = std::set<std::string>(dims.begin(), dims.end());
  }

  bool atEnd() const { return toks_[pos_].kind == Token::Kind::End; }

 private:
  static std::string stripKind(const Error& e) {
    std::string m = e.what();
    auto p = m.find(": ");
    return p == std::string::npos ? m : m.substr(p + 2);
  }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorKind::SyntaxError, where(t) + ": " + msg + " (found " + got + ")");
  }

  void checkRank(std::optional<std::size_t>& rank, std::size_t r, const Token& at) {
    if (!rank) rank = r;
    else if (*rank != r)
      throw Error(ErrorKind::MixedRank, where(at) + ": region of rank " + std::to_string(r) +
                                            " in a rank-" + std::to_string(*rank) + " boundary");
  }

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  static bool isSym(const Token& t, std::string_view s) {
    return t.kind == Token::Kind::Sym && t.text == s;
  }
  static bool isKeyword(const Token& t, std::string_view s) {
    return t.kind == Token::Kind::Ident && t.text == s;
  }
  bool acceptSym(std::string_view s) {
    if (isSym(peek(), s)) {
      next();
      return true;
    }
    return false;
  }
  void expectSym(std::string_view s) {
    if (!acceptSym(s)) fail(peek(), "expected '" + std::string(s) + "'");
  }
  const Token& expectIdent() {
    if (peek().kind != Token::Kind::Ident) fail(peek(), "expected an identifier");
    return next();
  }

  static bool reserved(std::string_view s) {
    return s == "fst" || s == "snd" || s == "size" || s == "from" || s == "to" || s == "fun";
  }

  // -- patterns -------------------------------------------------------------

  std::string expectDim() {
    const Token& d = expectIdent();
    if (!declared_.count(d.text))
      throw Error(ErrorKind::UndeclaredDimension, where(d) + ": dimension '" + d.text + "' not declared");
    return d.text;
  }

  GridPattern parsePattern() {
    std::vector<std::string> dims{expectDim()};
    while (acceptSym("*")) dims.push_back(expectDim());
    expectSym(":");
    if (dims.size() == 1) return parse1DBody(dims[0]);
    if (dims.size() == 2) return parse2DBody(dims[0], dims[1]);
    fail(peek(), "flat patterns cover at most two dimensions; nest 1D patterns instead");
  }

  PatternLeaf parseLeaf() {
    if (acceptSym("_")) return {};
    const Token& v = expectIdent();
    if (reserved(v.text)) fail(v, "reserved word used as a pattern variable");
    return {v.text};
  }

  Pattern1D parse1DBody(const std::string& dim) {
    Pattern1D p{dim, {}};
    expectSym("|");
    while (!acceptSym("|")) {
      PatternElement e;
      e.cursor = acceptSym("@");
      if (peek().kind == Token::Kind::Ident && isSym(peek(1), ":")) {
        std::string inner = expectDim();
        expectSym(":");
        e.item = std::make_shared<const Pattern1D>(parse1DBody(inner));
      } else {
        e.item = parseLeaf();
      }
      p.elems.push_back(std::move(e));
    }
    return p;
  }

  Pattern2D parse2DBody(const std::string& colDim, const std::string& rowDim) {
    Pattern2D p{colDim, rowDim, {}};
    do {
      expectSym("|");
      std::vector<PatternCell> row;
      while (!acceptSym("|")) {
        PatternCell c;
        c.cursor = acceptSym("@");
        c.leaf = parseLeaf();
        row.push_back(std::move(c));
      }
      p.rows.push_back(std::move(row));
    } while (isSym(peek(), "|"));
    return p;
  }

  // -- boundary descriptors ---------------------------------------------------

  RegionComponent parseComponent() {
    const Token& s = peek();
    if (acceptSym("*")) {
      const Token& v = expectIdent();
      if (reserved(v.text)) fail(v, "reserved word used as a wildcard variable");
      return wildcard(v.text);
    }
    if (isSym(s, "-") || isSym(s, "+")) {
      next();
      const Token& n = peek();
      if (n.kind != Token::Kind::Int) fail(n, "expected a region depth after sign");
      next();
      if (n.intValue < 1)
        throw Error(ErrorKind::MalformedRegion, where(n) + ": region depth must be at least 1");
      return RelComponent{isSym(s, "-") ? -n.intValue : n.intValue};
    }
    fail(s, "expected a region component (-n, +n or *v)");
  }

  RegionDescriptor parseDescriptor() {
    const Token& at = peek();
    std::vector<RegionComponent> comps;
    if (acceptSym("(")) {
      do comps.push_back(parseComponent());
      while (acceptSym(","));
      expectSym(")");
    } else {
      comps.push_back(parseComponent());
    }
    try {
      return RegionDescriptor(std::move(comps));
    } catch (const Error& e) {
      throw Error(e.kind(), where(at) + ": " + stripKind(e));
    }
  }

  // A clause starts with `from`, `(`, or a bare rank-1 component followed by
  // an optional grid parameter and `->`.
  bool bareComponentClauseAhead() const {
    const Token& a = peek();
    const Token& b = peek(1);
    bool comp = ((isSym(a, "-") || isSym(a, "+")) && b.kind == Token::Kind::Int) ||
                (isSym(a, "*") && b.kind == Token::Kind::Ident);
    if (!comp) return false;
    if (isSym(peek(2), "->")) return true;
    return peek(2).kind == Token::Kind::Ident && isSym(peek(3), "->");
  }

  bool startsClause() const {
    const Token& t = peek();
    return isKeyword(t, "from") || isSym(t, "(") || bareComponentClauseAhead();
  }

  // -- expressions -------------------------------------------------------------

  Expr parseExpr(bool clauseMode) {
    Expr lhs;
    if (acceptSym("-")) lhs = mk::neg(parseTerm(clauseMode));
    else lhs = parseTerm(clauseMode);
    for (;;) {
      if (clauseMode && bareComponentClauseAhead()) break;
      if (acceptSym("+")) lhs = mk::bin(BinOp::Add, lhs, parseTerm(clauseMode));
      else if (acceptSym("-")) lhs = mk::bin(BinOp::Sub, lhs, parseTerm(clauseMode));
      else break;
    }
    return lhs;
  }

  Expr parseTerm(bool clauseMode) {
    Expr lhs = parseFactor();
    for (;;) {
      if (clauseMode && bareComponentClauseAhead()) break;
      if (acceptSym("*")) lhs = mk::bin(BinOp::Mul, lhs, parseFactor());
      else if (acceptSym("/")) lhs = mk::bin(BinOp::Div, lhs, parseFactor());
      else break;
    }
    return lhs;
  }

  Expr parseFactor() {
    const Token& at = peek();
    Expr e = parseApp();
    if (acceptSym("!!!")) {
      const auto* v = std::get_if<VarRef>(&e->node);
      if (!v) fail(at, "left operand of !!! must be the grid parameter");
      e = mk::index(v->name, parseAtom());
    }
    return e;
  }

  Expr parseApp() {
    const Token& t = peek();
    if (isKeyword(t, "fst")) {
      next();
      return mk::fst(parseAtom());
    }
    if (isKeyword(t, "snd")) {
      next();
      return mk::snd(parseAtom());
    }
    if (isKeyword(t, "size")) {
      next();
      bool paren = acceptSym("(");
      const Token& g = expectIdent();
      if (paren) expectSym(")");
      return mk::size(g.text);
    }
    return parseAtom();
  }

  Expr parseAtom() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Int: next(); return mk::integer(t.intValue);
      case Token::Kind::Float: next(); return mk::flt(t.floatValue);
      case Token::Kind::Ident:
        if (reserved(t.text)) fail(t, "unexpected keyword");
        next();
        return mk::var(t.text);
      default: break;
    }
    if (acceptSym("(")) {
      std::vector<Expr> elems{parseExpr(false)};
      while (acceptSym(",")) elems.push_back(parseExpr(false));
      expectSym(")");
      return elems.size() == 1 ? elems[0] : mk::tuple(std::move(elems));
    }
    fail(t, "expected an expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> declared_;
};

inline Program parseProgram(std::string_view text) { return Parser(text).parseProgram(); }

/// Parses a standalone boundary definition such as `Double from (-1) to (+1) -> 0.0`.
inline BoundarySpec parseBoundaryDef(std::string_view text) {
  Parser p(text);
  BoundarySpec b = p.parseBoundaryBody(true);
  if (!p.atEnd()) throw Error(ErrorKind::SyntaxError, "unexpected input after boundary definition");
  return b;
}

/// Parses `[fun] <pattern> -> <expr>` against the given declared dimensions.
inline StencilDef parseStencilDef(std::string_view text, const std::vector<std::string>& dims) {
  Parser p(text);
  p.declareDimensions(dims);
  StencilDef s = p.parseFun();
  if (!p.atEnd()) throw Error(ErrorKind::SyntaxError, "unexpected input after stencil definition");
  return s;
}

inline Expr parseExpression(std::string_view text) { return Parser(text).parseStandaloneExpr(); }

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string leafText(const std::map<RelIndex, std::string>& names, const RelIndex& r, bool cursor) {
  auto it = names.find(r);
  std::string s = it == names.end() ? "_" : it->second;
  return cursor ? "@" + s : s;
}

// Prints a nested 1D pattern for dimension `level` covering the box
// [lo, hi]; `fixed` carries the already-chosen outer components.
inline std::string nestedPattern(const StencilDef& s, const std::map<RelIndex, std::string>& names,
                                 const RelIndex& lo, const RelIndex& hi, std::size_t level,
                                 RelIndex fixed) {
  std::string out = s.dims.names()[level] + ":|";
  for (std::int64_t k = lo[level]; k <= hi[level]; ++k) {
    fixed[level] = k;
    out += " ";
    if (level == 0) {
      out += leafText(names, fixed, k == 0);  // every inner pattern carries its own @
    } else {
      if (k == 0) out += "@";
      out += nestedPattern(s, names, lo, hi, level - 1, fixed);
    }
  }
  return out + " |";
}

}  // namespace detail

/// Renders a stencil as `<pattern> -> <body>` using the smallest box holding
/// every binding and the cursor.
inline std::string formatStencil(const StencilDef& s) {
  std::size_t rank = s.dims.rank();
  RelIndex lo = RelIndex::zero(rank), hi = RelIndex::zero(rank);
  std::map<RelIndex, std::string> names;
  for (const auto& [n, r] : s.bindings) {
    names[r] = n;
    for (std::size_t d = 0; d < rank; ++d) {
      lo[d] = std::min(lo[d], r[d]);
      hi[d] = std::max(hi[d], r[d]);
    }
  }
  std::string pat;
  if (rank == 2) {
    pat = s.dims.names()[0] + "*" + s.dims.names()[1] + ":";
    for (std::int64_t y = lo[1]; y <= hi[1]; ++y) {
      pat += " |";
      for (std::int64_t x = lo[0]; x <= hi[0]; ++x) pat += " " + detail::leafText(names, RelIndex{x, y}, x == 0 && y == 0);
      pat += " |";
    }
  } else {
    pat = detail::nestedPattern(s, names, lo, hi, rank - 1, RelIndex::zero(rank));
  }
  return pat + " -> " + (s.body ? formatExpr(s.body) : "0");
}

inline std::string formatBoundaryClauses(const BoundarySpec& b) {
  std::string out;
  for (const BoundaryClause& c : b.clauses()) {
    out += "\n    " + formatDescriptor(c.descriptor);
    if (c.gridParam) out += " " + *c.gridParam;
    out += " -> " + formatExpr(c.body);
  }
  return out;
}

inline std::string printProgram(const Program& p) {
  std::string out = "dimensions ";
  for (std::size_t i = 0; i < p.dimensions.size(); ++i) out += (i ? ", " : "") + p.dimensions[i];
  out += ";\n";
  for (const auto& [n, s] : p.stencils) out += "stencil " + n + " = fun " + formatStencil(s) + ";\n";
  for (const auto& [n, b] : p.boundaries)
    out += "boundary " + n + " : " + std::string(elemTypeName(b.elemType())) + " =" +
           formatBoundaryClauses(b) + ";\n";
  return out;
}

inline bool programEqual(const Program& a, const Program& b) {
  if (a.dimensions != b.dimensions || a.stencils.size() != b.stencils.size() ||
      a.boundaries.size() != b.boundaries.size())
    return false;
  for (std::size_t i = 0; i < a.stencils.size(); ++i)
    if (a.stencils[i].first != b.stencils[i].first ||
        !stencilEqual(a.stencils[i].second, b.stencils[i].second))
      return false;
  for (std::size_t i = 0; i < a.boundaries.size(); ++i)
    if (a.boundaries[i].first != b.boundaries[i].first ||
        !specEqual(a.boundaries[i].second, b.boundaries[i].second))
      return false;
  return true;
}

}  // namespace ypnos

#endif  // YPNOS_SYNTAX_HPP
