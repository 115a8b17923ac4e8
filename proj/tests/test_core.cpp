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

#include <random>
#include <set>

#include "ypnos/boundary.hpp"
#include "ypnos/core.hpp"

using namespace ypnos;

namespace {

template <class F>
ErrorKind kindOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ypnos::Error thrown";
  return ErrorKind::IoError;
}

RegionDescriptor desc(std::vector<RegionComponent> c) { return RegionDescriptor(std::move(c)); }

}  // namespace

TEST(RelIndex, FormatsSigned) {
  EXPECT_EQ(formatRel(RelIndex{1, 0}), "(+1,0)");
  EXPECT_EQ(formatRel(RelIndex{-1, 0, 2}), "(-1,0,+2)");
  EXPECT_EQ(formatAbs(AbsIndex{3, -4}), "(3,-4)");
}

TEST(RelIndex, OrdersByRankThenLexicographically) {
  EXPECT_LT(RelIndex{5}, RelIndex(std::size_t{2}));
  EXPECT_LT((RelIndex{-1, 5}), (RelIndex{0, -9}));
  EXPECT_LT((RelIndex{0, -1}), (RelIndex{0, 0}));
  EXPECT_EQ((RelIndex{1, 2}), RelIndex::fromVector({1, 2}));
}

TEST(RelIndex, RankLimits) {
  EXPECT_EQ(kindOf([] { RelIndex::fromVector({1, 2, 3, 4}); }), ErrorKind::RankMismatch);
  EXPECT_EQ(kindOf([] { RelIndex::fromVector({}); }), ErrorKind::RankMismatch);
}

TEST(Pred, StepsTowardZero) {
  EXPECT_EQ(pred(3), 2);
  EXPECT_EQ(pred(-3), -2);
  EXPECT_EQ(pred(1), 0);
  EXPECT_EQ(pred(-1), 0);
  EXPECT_EQ(pred(0), 0);
  static_assert(pred(-2) == -1);
}

TEST(Pred, ReachesZeroInMagnitudeSteps) {
  for (std::int64_t n = -20; n <= 20; ++n) {
    std::int64_t x = n, steps = 0;
    while (x != 0) x = pred(x), ++steps;
    EXPECT_EQ(steps, n < 0 ? -n : n);
  }
}

TEST(AbsToRel, WildcardsBecomeZero) {
  EXPECT_EQ(absToRel(desc({wildcard("i"), relComponent(-1)})), (RelIndex{0, -1}));
  EXPECT_EQ(absToRel(desc({relComponent(1), relComponent(1)})), (RelIndex{1, 1}));
  EXPECT_EQ(absToRel(desc({relComponent(-2)})), RelIndex{-2});
}

TEST(AbsToRel, RoundTripsThroughRelToDescriptor) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> comp(-3, 3), rank(1, 3);
  for (int n = 0; n < 500; ++n) {
    RelIndex r(static_cast<std::size_t>(rank(rng)));
    for (std::size_t d = 0; d < r.rank(); ++d) r[d] = comp(rng);
    EXPECT_EQ(absToRel(relToDescriptor(r)), r);
  }
}

TEST(RegionDescriptor, RejectsMalformed) {
  EXPECT_EQ(kindOf([] { relComponent(0); }), ErrorKind::MalformedRegion);
  EXPECT_EQ(kindOf([] { desc({wildcard("i"), wildcard("i")}); }), ErrorKind::MalformedRegion);
  EXPECT_EQ(kindOf([] { desc({}); }), ErrorKind::MalformedRegion);
  EXPECT_EQ(formatDescriptor(desc({wildcard("i"), relComponent(-1)})), "(*i, -1)");
}

TEST(Dynamism, JoinIsStaticOnlyWhenBothStatic) {
  EXPECT_EQ(joinDynamism(Dynamism::Static, Dynamism::Static), Dynamism::Static);
  EXPECT_EQ(joinDynamism(Dynamism::Static, Dynamism::Dynamic), Dynamism::Dynamic);
  EXPECT_EQ(joinDynamism(Dynamism::Dynamic, Dynamism::Static), Dynamism::Dynamic);
  EXPECT_EQ(joinDynamism(Dynamism::Dynamic, Dynamism::Dynamic), Dynamism::Dynamic);
}

TEST(HaloBounds, ComponentwiseExtremaIncludingOrigin) {
  std::set<RelIndex> regions{{-1, 0}, {0, 2}, {1, 1}};
  HaloBounds h = haloBoundsOf(2, regions);
  EXPECT_EQ(h.lower, (RelIndex{-1, 0}));
  EXPECT_EQ(h.upper, (RelIndex{1, 2}));
  HaloBounds none = haloBoundsOf(2, std::set<RelIndex>{});
  EXPECT_EQ(none.lower, RelIndex::zero(2));
  EXPECT_EQ(none.upper, RelIndex::zero(2));
  EXPECT_EQ(kindOf([] { haloBoundsOf(2, std::set<RelIndex>{RelIndex{1}}); }), ErrorKind::MixedRank);
}

TEST(HaloBounds, BruteForceAgreement) {
  // Oracle: fold every coordinate of every region plus 0 through min/max.
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> comp(-3, 3), count(0, 6);
  for (int n = 0; n < 300; ++n) {
    std::set<RelIndex> regions;
    int k = count(rng);
    for (int i = 0; i < k; ++i) regions.insert(RelIndex{comp(rng), comp(rng)});
    HaloBounds h = haloBoundsOf(2, regions);
    for (std::size_t d = 0; d < 2; ++d) {
      std::int64_t lo = 0, hi = 0;
      for (const auto& r : regions) lo = std::min(lo, r[d]), hi = std::max(hi, r[d]);
      EXPECT_EQ(h.lower[d], lo);
      EXPECT_EQ(h.upper[d], hi);
    }
  }
}

TEST(DimSpec, Validation) {
  EXPECT_EQ(DimSpec({"X", "Y"}).rank(), 2u);
  EXPECT_EQ(kindOf([] { DimSpec({"X", "X"}); }), ErrorKind::DuplicateName);
  EXPECT_EQ(kindOf([] { DimSpec({"A", "B", "C", "D"}); }), ErrorKind::RankMismatch);
}

TEST(BoundarySpec, DerivedFields) {
  std::vector<BoundaryClause> cs{
      {desc({wildcard("i"), relComponent(-1)}), std::nullopt, mk::flt(0.0)},
      {desc({relComponent(1), wildcard("j")}), "g", mk::index("g", mk::tuple({mk::integer(0), mk::var("j")}))},
  };
  BoundarySpec b(2, ElemType::Float64, cs);
  EXPECT_EQ(b.regionSet(), (std::set<RelIndex>{{0, -1}, {1, 0}}));
  EXPECT_EQ(b.dynamism(), Dynamism::Dynamic);
  EXPECT_EQ(b.haloLower(), (RelIndex{0, -1}));
  EXPECT_EQ(b.haloUpper(), (RelIndex{1, 0}));
  EXPECT_EQ(BoundarySpec::empty(2).dynamism(), Dynamism::Static);
}

TEST(BoundarySpec, Rejections) {
  auto zero = mk::flt(0.0);
  EXPECT_EQ(kindOf([&] {
              BoundarySpec(2, ElemType::Float64,
                           {{desc({relComponent(-1), wildcard("j")}), std::nullopt, zero},
                            {desc({relComponent(-1), wildcard("k")}), std::nullopt, zero}});
            }),
            ErrorKind::DuplicateRegion);
  EXPECT_EQ(kindOf([&] {
              BoundarySpec(2, ElemType::Float64, {{desc({relComponent(-1)}), std::nullopt, zero}});
            }),
            ErrorKind::MixedRank);
  EXPECT_EQ(kindOf([&] {
              BoundarySpec(2, ElemType::Float64, {{desc({wildcard("i"), wildcard("j")}), std::nullopt, zero}});
            }),
            ErrorKind::MalformedRegion);
  EXPECT_EQ(kindOf([&] {
              BoundarySpec(1, ElemType::Float64, {{desc({relComponent(-1)}), std::nullopt, mk::var("q")}});
            }),
            ErrorKind::UnboundVariable);
  EXPECT_EQ(kindOf([&] {
              BoundarySpec(1, ElemType::Float64, {{desc({relComponent(-1)}), std::nullopt, mk::size("g")}});
            }),
            ErrorKind::IllegalBuiltin);
}

TEST(EnumerateRegionCells, FigureOneGeometry) {
  AbsIndex lo{0, 0}, hi{4, 4};
  auto b = enumerateRegionCells(desc({wildcard("i"), relComponent(-1)}), lo, hi);
  ASSERT_EQ(b.size(), 4u);
  for (std::int64_t i = 0; i < 4; ++i) {
    EXPECT_EQ(b[static_cast<std::size_t>(i)].cell, (AbsIndex{i, -1}));
    EXPECT_EQ(b[static_cast<std::size_t>(i)].bindings.at(0).second, i);
  }
  auto h = enumerateRegionCells(desc({relComponent(1), relComponent(1)}), lo, hi);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].cell, (AbsIndex{4, 4}));
  auto e2 = enumerateRegionCells(desc({relComponent(2), wildcard("j")}), lo, hi);
  ASSERT_EQ(e2.size(), 4u);
  EXPECT_EQ(e2.front().cell, (AbsIndex{5, 0}));
  EXPECT_EQ(e2.back().cell, (AbsIndex{5, 3}));
}
