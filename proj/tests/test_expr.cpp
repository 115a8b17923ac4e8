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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <random>

#include "ypnos/expr.hpp"
#include "ypnos/syntax.hpp"

using namespace ypnos;

namespace {

class FakeGrid : public GridBinding {
 public:
  FakeGrid(std::int64_t w, std::int64_t h) : w_(w), h_(h) {}
  std::size_t rank() const override { return 2; }
  AbsIndex extentSize() const override { return AbsIndex{w_, h_}; }
  Value at(const AbsIndex& a) const override {
    if (a[0] < 0 || a[0] >= w_ || a[1] < 0 || a[1] >= h_)
      throw Error(ErrorKind::OutOfBoundsAccess, "fake grid");
    return a[0] == 0 ? 7.0 : static_cast<double>(a[0] * 100 + a[1]);
  }

 private:
  std::int64_t w_, h_;
};

Value eval(const std::string& text, Env env = {}) { return evalExpr(parseExpression(text), env); }

bool sameBits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Eval, LaplaceOfConstantIsZero) {
  Env env;
  for (const char* v : {"t", "l", "r", "b", "c"}) env.vars[v] = 1.0;
  EXPECT_EQ(eval("t + l + r + b - 4.0*c", env), Value(0.0));
}

TEST(Eval, WrapIndexAndSize) {
  FakeGrid g(8, 5);
  Env env;
  env.grid = &g;
  env.gridName = "g";
  env.vars["j"] = std::int64_t{3};
  EXPECT_EQ(eval("g!!!(0, j)", env), Value(7.0));
  EXPECT_EQ(eval("fst(size(g))", env), Value(std::int64_t{8}));
  EXPECT_EQ(eval("fst (size g) - 1", env), Value(std::int64_t{7}));
  EXPECT_EQ(eval("snd (size g)", env), Value(std::int64_t{5}));
  EXPECT_EQ(eval("g!!!(fst (size g) - 1, j)", env), Value(703.0));
  try {
    eval("g!!!(8, 0)", env);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfBoundsAccess);
  }
}

TEST(Eval, IntegerSemantics) {
  EXPECT_EQ(eval("7 / 2"), Value(std::int64_t{3}));
  EXPECT_EQ(eval("-7 / 2"), Value(std::int64_t{-3}));
  EXPECT_EQ(eval("7 / 2.0"), Value(3.5));
  EXPECT_EQ(eval("1 + 2 * 3"), Value(std::int64_t{7}));
  EXPECT_EQ(eval("9223372036854775807 + 1"), Value(std::numeric_limits<std::int64_t>::min()));
  try {
    eval("1 / 0");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivisionByZero);
  }
  EXPECT_TRUE(std::isinf(eval("1.0 / 0").asFloat()));
}

TEST(Eval, TupleMisuseIsTypeMismatch) {
  for (const char* bad : {"(1, 2) + 1", "fst 3", "-(1, 2)", "snd (1)"}) {
    try {
      eval(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::TypeMismatch) << bad;
    }
  }
}

TEST(Eval, LeftToRightAssociation) {
  Env env;
  env.vars["a"] = 1e16;
  env.vars["b"] = -1e16;
  env.vars["c"] = 1.0;
  EXPECT_EQ(eval("a + b + c", env), Value(1.0));
  EXPECT_EQ(eval("a + (b + c)", env), Value((1e16 + (-1e16 + 1.0))));
}

TEST(Eval, DeterministicUnderIrrelevantBindings) {
  Env a, b;
  a.vars["x"] = 2.5;
  b.vars["x"] = 2.5;
  b.vars["unused"] = 99.0;
  EXPECT_EQ(eval("x * x - 1", a), eval("x * x - 1", b));
}

TEST(Format, RoundTripsThroughParser) {
  for (const char* s : {"t + l + r + b - 4.0 * c", "a - (b - c)", "a * (b + c) / d", "-a + 1",
                        "fst (size g) - 1", "g!!!(i, 0)", "(-1) * x", "2.5e-07 * q"}) {
    Expr e = parseExpression(s);
    Expr again = parseExpression(formatExpr(e));
    EXPECT_TRUE(exprEqual(e, again)) << s << " -> " << formatExpr(e);
  }
}

// The compiled evaluator must agree bit-for-bit with the tree walker on
// random scalar bodies.
TEST(CompiledExpr, MatchesTreeWalker) {
  std::mt19937_64 rng(3);
  std::vector<std::string> slots{"a", "b", "c", "d"};
  std::function<Expr(int)> gen = [&](int depth) -> Expr {
    int pick = static_cast<int>(rng() % (depth > 0 ? 7 : 3));
    switch (pick) {
      case 0: return mk::var(slots[rng() % slots.size()]);
      case 1: return mk::flt(std::uniform_real_distribution<double>(-3, 3)(rng));
      case 2: return mk::integer(static_cast<std::int64_t>(rng() % 7) + 1);
      case 3: return mk::neg(gen(depth - 1));
      default: return mk::bin(static_cast<BinOp>(rng() % 3), gen(depth - 1), gen(depth - 1));
    }
  };
  for (int n = 0; n < 2000; ++n) {
    Expr e = gen(4);
    bool useInt = n % 2;
    ElemType t = useInt ? ElemType::Int64 : ElemType::Float64;
    auto c = CompiledExpr::compile(e, slots, t);
    ASSERT_TRUE(c.has_value());
    std::vector<double> fv(4);
    std::vector<std::int64_t> iv(4);
    Env env;
    for (std::size_t k = 0; k < 4; ++k) {
      fv[k] = std::uniform_real_distribution<double>(-5, 5)(rng);
      iv[k] = static_cast<std::int64_t>(rng() % 41) - 20;
      env.vars[slots[k]] = useInt ? Value(iv[k]) : Value(fv[k]);
    }
    std::vector<CompiledExpr::Scalar> stack(c->stackDepth() + 1);
    Value ref = evalExpr(e, env);
    CompiledExpr::Scalar got = useInt ? c->run(iv.data(), stack.data()) : c->run(fv.data(), stack.data());
    if (c->resultType() == ElemType::Int64) {
      ASSERT_TRUE(ref.isInt());
      EXPECT_EQ(got.i, ref.asInt());
    } else {
      ASSERT_TRUE(ref.isFloat());
      EXPECT_TRUE(sameBits(got.f, ref.asFloat())) << formatExpr(e);
    }
  }
}

TEST(CompiledExpr, DeclinesTupleBodies) {
  EXPECT_FALSE(CompiledExpr::compile(parseExpression("fst (a, b)"), {"a", "b"}, ElemType::Float64));
}

TEST(Scope, Checks) {
  auto kind = [](const std::string& text, std::set<std::string> bound, std::optional<std::string> g) {
    try {
      checkScope(parseExpression(text), bound, g, "test");
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;  // sentinel for "accepted"
  };
  EXPECT_EQ(kind("x + y", {"x"}, std::nullopt), ErrorKind::UnboundVariable);
  EXPECT_EQ(kind("size g", {}, std::nullopt), ErrorKind::IllegalBuiltin);
  EXPECT_EQ(kind("g!!!(0, j)", {"j"}, "g"), ErrorKind::IoError);
  EXPECT_EQ(kind("h!!!(0, j)", {"j"}, "g"), ErrorKind::UnboundVariable);
  EXPECT_EQ(kind("g + 1", {}, "g"), ErrorKind::TypeMismatch);
}
