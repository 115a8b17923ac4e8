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

#ifndef YPNOS_BOUNDARY_HPP
#define YPNOS_BOUNDARY_HPP

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ypnos/core.hpp"
#include "ypnos/expr.hpp"

namespace ypnos {

/// One `descriptor [g] -> body` case. A dynamic clause names the grid it reads
/// through `gridParam`.
struct BoundaryClause {
  RegionDescriptor descriptor;
  std::optional<std::string> gridParam;
  Expr body;

  bool dynamic() const noexcept { return gridParam.has_value(); }
};

inline bool clauseEqual(const BoundaryClause& a, const BoundaryClause& b) {
  return a.descriptor == b.descriptor && a.gridParam == b.gridParam && exprEqual(a.body, b.body);
}

/// A validated boundary definition together with the facts derived from it.
/// Construction checks ranks, duplicate regions and body scoping.
class BoundarySpec {
 public:
  BoundarySpec() = default;

  /// Empty boundary of the given rank: no regions, no halo, static.
  static BoundarySpec empty(std::size_t rank, ElemType elemType = ElemType::Float64) {
    return BoundarySpec(rank, elemType, {});
  }

  BoundarySpec(std::size_t rank, ElemType elemType, std::vector<BoundaryClause> clauses)
      : rank_(rank), elemType_(elemType), clauses_(std::move(clauses)) {
    if (rank_ < 1 || rank_ > kMaxRank)
      throw Error(ErrorKind::RankMismatch, "boundary rank out of range");
    for (const BoundaryClause& c : clauses_) {
      if (c.descriptor.rank() != rank_) {
        throw Error(ErrorKind::MixedRank, "region " + formatDescriptor(c.descriptor) +
                                              " has rank " + std::to_string(c.descriptor.rank()) +
                                              ", expected " + std::to_string(rank_));
      }
      if (c.descriptor.allWildcard()) {
        throw Error(ErrorKind::MalformedRegion,
                    "region " + formatDescriptor(c.descriptor) + " names the interior");
      }
      RelIndex r = absToRel(c.descriptor);
      if (!regionSet_.insert(r).second) {
        throw Error(ErrorKind::DuplicateRegion,
                    "region " + formatDescriptor(c.descriptor) + " defined more than once");
      }
      std::set<std::string> bound;
      for (const auto& comp : c.descriptor.components())
        if (const auto* w = std::get_if<WildcardComponent>(&comp)) bound.insert(w->var);
      if (c.gridParam && bound.count(*c.gridParam)) {
        throw Error(ErrorKind::DuplicateName,
                    "grid parameter '" + *c.gridParam + "' shadows a wildcard variable");
      }
      checkScope(c.body, bound, c.gridParam, "boundary clause " + formatDescriptor(c.descriptor));
      dynamism_ = joinDynamism(dynamism_, c.dynamic() ? Dynamism::Dynamic : Dynamism::Static);
    }
    halo_ = haloBoundsOf(rank_, regionSet_);
  }

  std::size_t rank() const noexcept { return rank_; }
  ElemType elemType() const noexcept { return elemType_; }
  const std::vector<BoundaryClause>& clauses() const noexcept { return clauses_; }
  const std::set<RelIndex>& regionSet() const noexcept { return regionSet_; }
  Dynamism dynamism() const noexcept { return dynamism_; }
  const RelIndex& haloLower() const noexcept { return halo_.lower; }
  const RelIndex& haloUpper() const noexcept { return halo_.upper; }

 private:
  std::size_t rank_ = 1;
  ElemType elemType_ = ElemType::Float64;
  std::vector<BoundaryClause> clauses_;
  std::set<RelIndex> regionSet_;
  Dynamism dynamism_ = Dynamism::Static;
  HaloBounds halo_{RelIndex::zero(1), RelIndex::zero(1)};
};

inline HaloBounds haloBounds(const BoundarySpec& spec) {
  return {spec.haloLower(), spec.haloUpper()};
}

/// One halo cell of a region plus the wildcard bindings that produced it.
struct RegionCell {
  AbsIndex cell;
  std::vector<std::pair<std::string, std::int64_t>> bindings;
};

/// Cells covered by `d` on the extent [lower, upper). `-n` sits n cells before
/// the extent, `+n` n cells past its last cell, `*v` spans it and binds v.
inline std::vector<RegionCell> enumerateRegionCells(const RegionDescriptor& d, const AbsIndex& lower,
                                                    const AbsIndex& upper) {
  if (d.rank() != lower.rank() || d.rank() != upper.rank())
    throw Error(ErrorKind::RankMismatch, "region rank differs from extent rank");
  std::size_t rank = d.rank();
  std::vector<std::int64_t> from(rank), to(rank);
  for (std::size_t k = 0; k < rank; ++k) {
    if (const auto* r = std::get_if<RelComponent>(&d[k])) {
      from[k] = to[k] = r->offset < 0 ? lower[k] + r->offset : upper[k] - 1 + r->offset;
    } else {
      from[k] = lower[k];
      to[k] = upper[k] - 1;
    }
    if (from[k] > to[k]) return {};
  }
  std::vector<RegionCell> out;
  AbsIndex cur = AbsIndex::fromVector(from);
  for (;;) {
    RegionCell rc{cur, {}};
    for (std::size_t k = 0; k < rank; ++k)
      if (const auto* w = std::get_if<WildcardComponent>(&d[k])) rc.bindings.emplace_back(w->var, cur[k]);
    out.push_back(std::move(rc));
    std::size_t k = 0;
    while (k < rank && cur[k] == to[k]) cur[k] = from[k], ++k;
    if (k == rank) break;
    ++cur[k];
  }
  return out;
}

inline bool specEqual(const BoundarySpec& a, const BoundarySpec& b) {
  if (a.rank() != b.rank() || a.elemType() != b.elemType() ||
      a.clauses().size() != b.clauses().size())
    return false;
  for (std::size_t i = 0; i < a.clauses().size(); ++i)
    if (!clauseEqual(a.clauses()[i], b.clauses()[i])) return false;
  return true;
}

}  // namespace ypnos

#endif  // YPNOS_BOUNDARY_HPP
