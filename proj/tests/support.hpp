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

// Random generators and helpers shared by the test binaries.

#ifndef YPNOS_TESTS_SUPPORT_HPP
#define YPNOS_TESTS_SUPPORT_HPP

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ypnos/ypnos.hpp"

namespace ypnos::testing {

/// Every nonzero point of [-m, m]^rank.
inline std::vector<RelIndex> nonzeroBox(std::size_t rank, std::int64_t m) {
  std::vector<RelIndex> out;
  RelIndex cur(rank);
  for (std::size_t d = 0; d < rank; ++d) cur[d] = -m;
  for (;;) {
    if (!cur.isZero()) out.push_back(cur);
    std::size_t d = 0;
    while (d < rank && cur[d] == m) cur[d] = -m, ++d;
    if (d == rank) return out;
    ++cur[d];
  }
}

/// Region sets drawn with a per-case inclusion probability so that both
/// accepting and rejecting cases are common.
inline std::set<RelIndex> randomRegions(std::mt19937_64& rng, std::size_t rank, std::int64_t m) {
  double p = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
  std::bernoulli_distribution keep(p);
  std::set<RelIndex> out;
  for (const RelIndex& r : nonzeroBox(rank, m))
    if (keep(rng)) out.insert(r);
  return out;
}

inline std::set<RelIndex> randomAccess(std::mt19937_64& rng, std::size_t rank, std::int64_t m,
                                       int maxCount = 4) {
  std::uniform_int_distribution<std::int64_t> comp(-m, m);
  std::uniform_int_distribution<int> count(1, maxCount);
  std::set<RelIndex> out;
  int n = count(rng);
  for (int i = 0; i < n; ++i) {
    RelIndex r(rank);
    for (std::size_t d = 0; d < rank; ++d) r[d] = comp(rng);
    out.insert(r);
  }
  return out;
}

inline std::vector<std::string> dimNames(std::size_t rank) {
  std::vector<std::string> all{"X", "Y", "Z"};
  all.resize(rank);
  return all;
}

/// A stencil binding each access offset to its own variable, summing them.
inline StencilDef sumStencil(const std::set<RelIndex>& access) {
  StencilDef s;
  s.dims = DimSpec(dimNames(access.begin()->rank()));
  Expr body;
  int k = 0;
  for (const RelIndex& r : access) {
    std::string v = "a" + std::to_string(k++);
    s.bindings[v] = r;
    s.accessSet.insert(r);
    body = body ? mk::bin(BinOp::Add, body, mk::var(v)) : mk::var(v);
  }
  s.body = body;
  return s;
}

/// Static constant boundary naming exactly `regions`, each region a distinct
/// value so misplaced reads are visible.
inline BoundarySpec constantBoundary(std::size_t rank, const std::set<RelIndex>& regions) {
  std::vector<BoundaryClause> cs;
  double v = 1.0;
  for (const RelIndex& r : regions) cs.push_back({relToDescriptor(r), std::nullopt, mk::flt(v++)});
  return BoundarySpec(rank, ElemType::Float64, cs);
}

/// The eight one-deep regions of a 2D grid.
inline std::set<RelIndex> oneDeep2D() {
  return {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
}

inline StencilDef laplaceStencil() {
  return parseStencilDef(R"(X*Y:| _  t  _ |
                               | l @c  r |
                               | _  b  _ | -> t + l + r + b - 4.0*c)",
                         {"X", "Y"});
}

}  // namespace ypnos::testing

#endif  // YPNOS_TESTS_SUPPORT_HPP
