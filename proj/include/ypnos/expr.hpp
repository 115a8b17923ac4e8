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

// Body expressions of stencils and boundary clauses: arithmetic over
// Float64/Int64 scalars, index tuples, and the grid builtins `size`, `fst`,
// `snd` and `!!!`. Two evaluators share one semantics: `evalExpr` walks the
// tree and handles everything; `CompiledExpr` flattens scalar-only bodies to
// postfix code for the stencil inner loop.

#ifndef YPNOS_EXPR_HPP
#define YPNOS_EXPR_HPP

#include <charconv>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ypnos/core.hpp"

namespace ypnos {

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

struct Value;
using Tuple = std::vector<Value>;

struct Value {
  std::variant<double, std::int64_t, Tuple> v;

  Value() : v(0.0) {}
  Value(double d) : v(d) {}                   // NOLINT(google-explicit-constructor)
  Value(std::int64_t i) : v(i) {}             // NOLINT(google-explicit-constructor)
  Value(int i) : v(static_cast<std::int64_t>(i)) {}  // NOLINT(google-explicit-constructor)
  Value(Tuple t) : v(std::move(t)) {}         // NOLINT(google-explicit-constructor)

  bool isFloat() const { return std::holds_alternative<double>(v); }
  bool isInt() const { return std::holds_alternative<std::int64_t>(v); }
  bool isTuple() const { return std::holds_alternative<Tuple>(v); }

  double asFloat() const { return std::get<double>(v); }
  std::int64_t asInt() const { return std::get<std::int64_t>(v); }
  const Tuple& asTuple() const { return std::get<Tuple>(v); }

  /// Bitwise comparison for floats so that NaN == NaN and -0.0 != 0.0.
  friend bool operator==(const Value& a, const Value& b);
};

inline bool operator==(const Value& a, const Value& b) {
  if (a.v.index() != b.v.index()) return false;
  if (a.isFloat()) {
    double x = a.asFloat(), y = b.asFloat();
    return std::memcmp(&x, &y, sizeof x) == 0;
  }
  if (a.isInt()) return a.asInt() == b.asInt();
  return a.asTuple() == b.asTuple();
}

inline std::string formatFloat(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string formatValue(const Value& v) {
  if (v.isFloat()) return formatFloat(v.asFloat());
  if (v.isInt()) return std::to_string(v.asInt());
  std::string s = "(";
  const auto& t = v.asTuple();
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + formatValue(t[i]);
  return s + ")";
}

// Wrapping Int64 arithmetic; overflow is defined, not UB.
namespace detail {
inline std::int64_t wrapAdd(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
inline std::int64_t wrapSub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
inline std::int64_t wrapMul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}
inline std::int64_t wrapNeg(std::int64_t a) { return wrapSub(0, a); }
inline std::int64_t truncDiv(std::int64_t a, std::int64_t b) {
  if (b == 0) throw Error(ErrorKind::DivisionByZero, "integer division by zero");
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
  return a / b;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Expression tree
// ---------------------------------------------------------------------------

enum class BinOp : std::uint8_t { Add, Sub, Mul, Div };

inline char binOpChar(BinOp op) {
  switch (op) {
    case BinOp::Add: return '+';
    case BinOp::Sub: return '-';
    case BinOp::Mul: return '*';
    case BinOp::Div: return '/';
  }
  return '?';
}

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct FloatLit { double value; };
struct IntLit { std::int64_t value; };
struct VarRef { std::string name; };
struct Binary { BinOp op; Expr lhs, rhs; };
struct Negate { Expr operand; };
struct TupleExpr { std::vector<Expr> elems; };
struct Fst { Expr operand; };
struct Snd { Expr operand; };
struct SizeOf { std::string grid; };
struct IndexAbs { std::string grid; Expr index; };  // grid !!! index

struct ExprNode {
  std::variant<FloatLit, IntLit, VarRef, Binary, Negate, TupleExpr, Fst, Snd, SizeOf, IndexAbs>
      node;
};

namespace mk {
inline Expr flt(double v) { return std::make_shared<ExprNode>(ExprNode{FloatLit{v}}); }
inline Expr integer(std::int64_t v) { return std::make_shared<ExprNode>(ExprNode{IntLit{v}}); }
inline Expr var(std::string n) { return std::make_shared<ExprNode>(ExprNode{VarRef{std::move(n)}}); }
inline Expr bin(BinOp op, Expr a, Expr b) {
  return std::make_shared<ExprNode>(ExprNode{Binary{op, std::move(a), std::move(b)}});
}
inline Expr neg(Expr e) { return std::make_shared<ExprNode>(ExprNode{Negate{std::move(e)}}); }
inline Expr tuple(std::vector<Expr> es) {
  return std::make_shared<ExprNode>(ExprNode{TupleExpr{std::move(es)}});
}
inline Expr fst(Expr e) { return std::make_shared<ExprNode>(ExprNode{Fst{std::move(e)}}); }
inline Expr snd(Expr e) { return std::make_shared<ExprNode>(ExprNode{Snd{std::move(e)}}); }
inline Expr size(std::string g) { return std::make_shared<ExprNode>(ExprNode{SizeOf{std::move(g)}}); }
inline Expr index(std::string g, Expr i) {
  return std::make_shared<ExprNode>(ExprNode{IndexAbs{std::move(g), std::move(i)}});
}
}  // namespace mk

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

/// Structural equality; float literals compare bitwise.
inline bool exprEqual(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const FloatLit& x) {
            double y = std::get<FloatLit>(b->node).value;
            return std::memcmp(&x.value, &y, sizeof y) == 0;
          },
          [&](const IntLit& x) { return x.value == std::get<IntLit>(b->node).value; },
          [&](const VarRef& x) { return x.name == std::get<VarRef>(b->node).name; },
          [&](const Binary& x) {
            const auto& y = std::get<Binary>(b->node);
            return x.op == y.op && exprEqual(x.lhs, y.lhs) && exprEqual(x.rhs, y.rhs);
          },
          [&](const Negate& x) { return exprEqual(x.operand, std::get<Negate>(b->node).operand); },
          [&](const TupleExpr& x) {
            const auto& y = std::get<TupleExpr>(b->node);
            if (x.elems.size() != y.elems.size()) return false;
            for (std::size_t i = 0; i < x.elems.size(); ++i)
              if (!exprEqual(x.elems[i], y.elems[i])) return false;
            return true;
          },
          [&](const Fst& x) { return exprEqual(x.operand, std::get<Fst>(b->node).operand); },
          [&](const Snd& x) { return exprEqual(x.operand, std::get<Snd>(b->node).operand); },
          [&](const SizeOf& x) { return x.grid == std::get<SizeOf>(b->node).grid; },
          [&](const IndexAbs& x) {
            const auto& y = std::get<IndexAbs>(b->node);
            return x.grid == y.grid && exprEqual(x.index, y.index);
          },
      },
      a->node);
}

// ---------------------------------------------------------------------------
// Printing (re-parseable surface syntax)
// ---------------------------------------------------------------------------

namespace detail {
inline int precedence(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e->node))
    return (b->op == BinOp::Add || b->op == BinOp::Sub) ? 6 : 7;
  return 10;
}
}  // namespace detail

inline std::string formatExpr(const Expr& e) {
  auto child = [](const Expr& c, int minPrec) {
    std::string s = formatExpr(c);
    return detail::precedence(c) < minPrec ? "(" + s + ")" : s;
  };
  return std::visit(
      overloaded{
          [](const FloatLit& x) { return formatFloat(x.value); },
          [](const IntLit& x) { return std::to_string(x.value); },
          [](const VarRef& x) { return x.name; },
          [&](const Binary& x) {
            int p = detail::precedence(e);
            return child(x.lhs, p) + " " + binOpChar(x.op) + " " + child(x.rhs, p + 1);
          },
          [&](const Negate& x) { return "(-" + child(x.operand, 7) + ")"; },
          [](const TupleExpr& x) {
            std::string s = "(";
            for (std::size_t i = 0; i < x.elems.size(); ++i)
              s += (i ? ", " : "") + formatExpr(x.elems[i]);
            return s + ")";
          },
          [&](const Fst& x) { return "fst (" + formatExpr(x.operand) + ")"; },
          [&](const Snd& x) { return "snd (" + formatExpr(x.operand) + ")"; },
          [](const SizeOf& x) { return "size " + x.grid; },
          [&](const IndexAbs& x) {
            std::string idx = formatExpr(x.index);
            if (!std::holds_alternative<TupleExpr>(x.index->node)) idx = "(" + idx + ")";
            return x.grid + "!!!" + idx;
          },
      },
      e->node);
}

// ---------------------------------------------------------------------------
// Scope analysis
// ---------------------------------------------------------------------------

struct ExprFacts {
  std::set<std::string> freeVars;    // variable references (excluding grid operands)
  std::set<std::string> gridOperands;  // names used as `size g` / `g !!! ...`
  bool tupleOps = false;             // tuple literal, fst or snd present
};

inline void collectFacts(const Expr& e, ExprFacts& out) {
  std::visit(overloaded{
                 [](const FloatLit&) {},
                 [](const IntLit&) {},
                 [&](const VarRef& x) { out.freeVars.insert(x.name); },
                 [&](const Binary& x) {
                   collectFacts(x.lhs, out);
                   collectFacts(x.rhs, out);
                 },
                 [&](const Negate& x) { collectFacts(x.operand, out); },
                 [&](const TupleExpr& x) {
                   out.tupleOps = true;
                   for (const auto& el : x.elems) collectFacts(el, out);
                 },
                 [&](const Fst& x) {
                   out.tupleOps = true;
                   collectFacts(x.operand, out);
                 },
                 [&](const Snd& x) {
                   out.tupleOps = true;
                   collectFacts(x.operand, out);
                 },
                 [&](const SizeOf& x) { out.gridOperands.insert(x.grid); },
                 [&](const IndexAbs& x) {
                   out.gridOperands.insert(x.grid);
                   collectFacts(x.index, out);
                 },
             },
             e->node);
}

inline ExprFacts exprFacts(const Expr& e) {
  ExprFacts f;
  collectFacts(e, f);
  return f;
}

/// Load-time well-scopedness check. `gridParam` names the grid of a dynamic
/// boundary clause; without it `size` and `!!!` are rejected.
inline void checkScope(const Expr& e, const std::set<std::string>& bound,
                       const std::optional<std::string>& gridParam, std::string_view where) {
  ExprFacts f = exprFacts(e);
  for (const auto& g : f.gridOperands) {
    if (!gridParam) {
      throw Error(ErrorKind::IllegalBuiltin,
                  std::string(where) + ": size/!!! only allowed in parameterised boundary clauses");
    }
    if (g != *gridParam) {
      throw Error(ErrorKind::UnboundVariable,
                  std::string(where) + ": '" + g + "' is not the grid parameter");
    }
  }
  for (const auto& v : f.freeVars) {
    if (gridParam && v == *gridParam) {
      throw Error(ErrorKind::TypeMismatch,
                  std::string(where) + ": grid parameter '" + v + "' used as a value");
    }
    if (!bound.count(v)) {
      throw Error(ErrorKind::UnboundVariable, std::string(where) + ": unbound variable '" + v + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Tree-walking evaluator
// ---------------------------------------------------------------------------

/// What a dynamic boundary body can see of its grid.
class GridBinding {
 public:
  virtual ~GridBinding() = default;
  virtual std::size_t rank() const = 0;
  virtual AbsIndex extentSize() const = 0;
  /// Bounds-checked absolute read; throws OutOfBoundsAccess.
  virtual Value at(const AbsIndex& index) const = 0;
};

struct Env {
  std::map<std::string, Value, std::less<>> vars;
  const GridBinding* grid = nullptr;
  std::string gridName;
};

namespace detail {

inline Value arith(BinOp op, const Value& a, const Value& b) {
  if (a.isTuple() || b.isTuple())
    throw Error(ErrorKind::TypeMismatch, "arithmetic on a tuple");
  if (a.isInt() && b.isInt()) {
    std::int64_t x = a.asInt(), y = b.asInt();
    switch (op) {
      case BinOp::Add: return wrapAdd(x, y);
      case BinOp::Sub: return wrapSub(x, y);
      case BinOp::Mul: return wrapMul(x, y);
      case BinOp::Div: return truncDiv(x, y);
    }
  }
  double x = a.isInt() ? static_cast<double>(a.asInt()) : a.asFloat();
  double y = b.isInt() ? static_cast<double>(b.asInt()) : b.asFloat();
  switch (op) {
    case BinOp::Add: return x + y;
    case BinOp::Sub: return x - y;
    case BinOp::Mul: return x * y;
    case BinOp::Div: return x / y;
  }
  return 0.0;
}

inline const Tuple& requireTuple(const Value& v, const char* what) {
  if (!v.isTuple()) throw Error(ErrorKind::TypeMismatch, std::string(what) + " expects a tuple");
  return v.asTuple();
}

inline const GridBinding& requireGrid(const Env& env, const std::string& name) {
  if (!env.grid || env.gridName != name)
    throw Error(ErrorKind::UnboundVariable, "no grid bound to '" + name + "'");
  return *env.grid;
}

}  // namespace detail

inline Value evalExpr(const Expr& e, const Env& env) {
  return std::visit(
      overloaded{
          [](const FloatLit& x) -> Value { return x.value; },
          [](const IntLit& x) -> Value { return x.value; },
          [&](const VarRef& x) -> Value {
            auto it = env.vars.find(x.name);
            if (it == env.vars.end())
              throw Error(ErrorKind::UnboundVariable, "unbound variable '" + x.name + "'");
            return it->second;
          },
          [&](const Binary& x) -> Value {
            Value a = evalExpr(x.lhs, env);
            Value b = evalExpr(x.rhs, env);
            return detail::arith(x.op, a, b);
          },
          [&](const Negate& x) -> Value {
            Value a = evalExpr(x.operand, env);
            if (a.isInt()) return detail::wrapNeg(a.asInt());
            if (a.isFloat()) return -a.asFloat();
            throw Error(ErrorKind::TypeMismatch, "negation of a tuple");
          },
          [&](const TupleExpr& x) -> Value {
            Tuple t;
            t.reserve(x.elems.size());
            for (const auto& el : x.elems) t.push_back(evalExpr(el, env));
            return t;
          },
          [&](const Fst& x) -> Value {
            Value v = evalExpr(x.operand, env);
            const Tuple& t = detail::requireTuple(v, "fst");
            if (t.empty()) throw Error(ErrorKind::TypeMismatch, "fst of an empty tuple");
            return t[0];
          },
          [&](const Snd& x) -> Value {
            Value v = evalExpr(x.operand, env);
            const Tuple& t = detail::requireTuple(v, "snd");
            if (t.size() < 2) throw Error(ErrorKind::TypeMismatch, "snd of a tuple shorter than 2");
            return t[1];
          },
          [&](const SizeOf& x) -> Value {
            const GridBinding& g = detail::requireGrid(env, x.grid);
            AbsIndex s = g.extentSize();
            if (s.rank() == 1) return s[0];
            Tuple t;
            for (std::int64_t c : s) t.emplace_back(c);
            return t;
          },
          [&](const IndexAbs& x) -> Value {
            const GridBinding& g = detail::requireGrid(env, x.grid);
            Value iv = evalExpr(x.index, env);
            std::vector<std::int64_t> coords;
            if (iv.isInt()) {
              coords.push_back(iv.asInt());
            } else if (iv.isTuple()) {
              for (const Value& c : iv.asTuple()) {
                if (!c.isInt())
                  throw Error(ErrorKind::TypeMismatch, "grid index components must be Int");
                coords.push_back(c.asInt());
              }
            } else {
              throw Error(ErrorKind::TypeMismatch, "grid index must be Int or a tuple of Int");
            }
            if (coords.size() != g.rank())
              throw Error(ErrorKind::RankMismatch, "grid index rank differs from grid rank");
            return g.at(AbsIndex::fromVector(coords));
          },
      },
      e->node);
}

// ---------------------------------------------------------------------------
// Compiled scalar evaluator
// ---------------------------------------------------------------------------

/// Postfix code for bodies built from literals, slot variables, arithmetic and
/// negation. All slots share one element type. Operand order and promotion
/// rules are those of evalExpr, so results agree bit-for-bit.
class CompiledExpr {
 public:
  enum class Op : std::uint8_t {
    LoadF, LoadI, ConstF, ConstI, IntToFloat,
    AddF, SubF, MulF, DivF, NegF,
    AddI, SubI, MulI, DivI, NegI,
  };

  struct Instr {
    Op op;
    std::uint32_t slot = 0;
    double f = 0.0;
    std::int64_t i = 0;
  };

  /// Returns nothing when the body needs the tree walker (tuples, grid ops).
  static std::optional<CompiledExpr> compile(const Expr& body, const std::vector<std::string>& slots,
                                             ElemType slotType) {
    ExprFacts f = exprFacts(body);
    if (f.tupleOps || !f.gridOperands.empty()) return std::nullopt;
    CompiledExpr out;
    int depth = 0;
    out.resultType_ = out.emit(body, slots, slotType, depth);
    return out;
  }

  ElemType resultType() const noexcept { return resultType_; }
  std::size_t stackDepth() const noexcept { return maxDepth_; }
  const std::vector<Instr>& code() const noexcept { return code_; }

  union Scalar {
    double f;
    std::int64_t i;
  };

  /// `slotValues[k]` is the value of slot k. `stack` needs stackDepth() cells.
  template <class T>
  Scalar run(const T* slotValues, Scalar* stack) const {
    std::size_t sp = 0;
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::LoadF: stack[sp++].f = static_cast<double>(slotValues[in.slot]); break;
        case Op::LoadI: stack[sp++].i = static_cast<std::int64_t>(slotValues[in.slot]); break;
        case Op::ConstF: stack[sp++].f = in.f; break;
        case Op::ConstI: stack[sp++].i = in.i; break;
        case Op::IntToFloat: stack[sp - 1].f = static_cast<double>(stack[sp - 1].i); break;
        case Op::AddF: --sp; stack[sp - 1].f = stack[sp - 1].f + stack[sp].f; break;
        case Op::SubF: --sp; stack[sp - 1].f = stack[sp - 1].f - stack[sp].f; break;
        case Op::MulF: --sp; stack[sp - 1].f = stack[sp - 1].f * stack[sp].f; break;
        case Op::DivF: --sp; stack[sp - 1].f = stack[sp - 1].f / stack[sp].f; break;
        case Op::NegF: stack[sp - 1].f = -stack[sp - 1].f; break;
        case Op::AddI: --sp; stack[sp - 1].i = detail::wrapAdd(stack[sp - 1].i, stack[sp].i); break;
        case Op::SubI: --sp; stack[sp - 1].i = detail::wrapSub(stack[sp - 1].i, stack[sp].i); break;
        case Op::MulI: --sp; stack[sp - 1].i = detail::wrapMul(stack[sp - 1].i, stack[sp].i); break;
        case Op::DivI: --sp; stack[sp - 1].i = detail::truncDiv(stack[sp - 1].i, stack[sp].i); break;
        case Op::NegI: stack[sp - 1].i = detail::wrapNeg(stack[sp - 1].i); break;
      }
    }
    return stack[0];
  }

 private:
  ElemType emit(const Expr& e, const std::vector<std::string>& slots, ElemType slotType,
                int& depth) {
    auto push = [&](Instr in) {
      code_.push_back(in);
      if (in.op == Op::LoadF || in.op == Op::LoadI || in.op == Op::ConstF || in.op == Op::ConstI) {
        ++depth;
        maxDepth_ = std::max<std::size_t>(maxDepth_, static_cast<std::size_t>(depth));
      }
    };
    return std::visit(
        overloaded{
            [&](const FloatLit& x) {
              push({Op::ConstF, 0, x.value, 0});
              return ElemType::Float64;
            },
            [&](const IntLit& x) {
              push({Op::ConstI, 0, 0.0, x.value});
              return ElemType::Int64;
            },
            [&](const VarRef& x) {
              auto it = std::find(slots.begin(), slots.end(), x.name);
              if (it == slots.end())
                throw Error(ErrorKind::UnboundVariable, "unbound variable '" + x.name + "'");
              auto slot = static_cast<std::uint32_t>(it - slots.begin());
              push({slotType == ElemType::Float64 ? Op::LoadF : Op::LoadI, slot, 0.0, 0});
              return slotType;
            },
            [&](const Binary& x) {
              ElemType lt = emit(x.lhs, slots, slotType, depth);
              std::size_t lhsEnd = code_.size();
              ElemType rt = emit(x.rhs, slots, slotType, depth);
              --depth;
              if (lt == ElemType::Int64 && rt == ElemType::Int64) {
                static constexpr Op kInt[] = {Op::AddI, Op::SubI, Op::MulI, Op::DivI};
                code_.push_back({kInt[static_cast<int>(x.op)]});
                return ElemType::Int64;
              }
              if (lt == ElemType::Int64)
                code_.insert(code_.begin() + static_cast<std::ptrdiff_t>(lhsEnd), {Op::IntToFloat});
              if (rt == ElemType::Int64) code_.push_back({Op::IntToFloat});
              static constexpr Op kFlt[] = {Op::AddF, Op::SubF, Op::MulF, Op::DivF};
              code_.push_back({kFlt[static_cast<int>(x.op)]});
              return ElemType::Float64;
            },
            [&](const Negate& x) {
              ElemType t = emit(x.operand, slots, slotType, depth);
              code_.push_back({t == ElemType::Float64 ? Op::NegF : Op::NegI});
              return t;
            },
            [&](const auto&) -> ElemType {
              throw Error(ErrorKind::IllegalBuiltin, "expression form not compilable");
            },
        },
        e->node);
  }

  std::vector<Instr> code_;
  std::size_t maxDepth_ = 0;
  ElemType resultType_ = ElemType::Float64;
};

}  // namespace ypnos

#endif  // YPNOS_EXPR_HPP
