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

// Static safety checking. A relative access r is safe against a region set
// when r names a region and every one-step-toward-the-cursor neighbour of r
// is itself safe:
//
//   safe(0) = true
//   safe(r) = r in regions  and  safe(r[d := pred(r_d)]) for each r_d != 0
//
// Passing the check licenses unchecked indexing in the runtime.

#ifndef YPNOS_SAFETY_HPP
#define YPNOS_SAFETY_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ypnos/boundary.hpp"
#include "ypnos/core.hpp"
#include "ypnos/syntax.hpp"

namespace ypnos {

inline bool inBoundary(const RelIndex& r, const std::set<RelIndex>& regions) {
  return regions.count(r) != 0;
}

namespace detail {

class SafeSolver {
 public:
  explicit SafeSolver(const std::set<RelIndex>& regions) : regions_(regions) {}

  bool safe(const RelIndex& r) {
    if (r.isZero()) return true;
    if (auto it = memo_.find(r); it != memo_.end()) return it->second;
    bool ok = inBoundary(r, regions_);
    for (std::size_t d = 0; ok && d < r.rank(); ++d) {
      if (r[d] == 0) continue;
      RelIndex q = r;
      q[d] = pred(r[d]);
      ok = safe(q);
    }
    memo_.emplace(r, ok);
    return ok;
  }

  /// Smallest region the full recurrence for r asks for but does not find.
  std::optional<RelIndex> smallestMissing(const RelIndex& r) {
    std::set<RelIndex> seen;
    std::optional<RelIndex> best;
    walk(r, seen, best);
    return best;
  }

 private:
  void walk(const RelIndex& r, std::set<RelIndex>& seen, std::optional<RelIndex>& best) {
    if (r.isZero() || !seen.insert(r).second) return;
    if (!inBoundary(r, regions_) && (!best || r < *best)) best = r;
    for (std::size_t d = 0; d < r.rank(); ++d) {
      if (r[d] == 0) continue;
      RelIndex q = r;
      q[d] = pred(r[d]);
      walk(q, seen, best);
    }
  }

  const std::set<RelIndex>& regions_;
  std::map<RelIndex, bool> memo_;
};

inline void requireRank(const RelIndex& r, const std::set<RelIndex>& regions) {
  for (const RelIndex& q : regions)
    if (q.rank() != r.rank())
      throw Error(ErrorKind::RankMismatch, "relative index rank differs from region rank");
}

}  // namespace detail

inline bool safe(const RelIndex& r, const std::set<RelIndex>& regions) {
  detail::requireRank(r, regions);
  return detail::SafeSolver(regions).safe(r);
}

struct SafetyViolation {
  RelIndex offset;
  RelIndex missingRegion;
  friend bool operator==(const SafetyViolation&, const SafetyViolation&) = default;
};

struct SafetyReport {
  bool ok = true;
  std::vector<SafetyViolation> violations;
};

inline std::string formatViolation(const SafetyViolation& v) {
  return "unsafe offset " + formatRel(v.offset) + ": missing boundary region " +
         formatRel(v.missingRegion);
}

inline SafetyReport checkAccesses(const std::set<RelIndex>& access, const std::set<RelIndex>& regions) {
  SafetyReport rep;
  detail::SafeSolver solver(regions);
  for (const RelIndex& r : access) {
    detail::requireRank(r, regions);
    if (solver.safe(r)) continue;
    rep.violations.push_back({r, *solver.smallestMissing(r)});
  }
  rep.ok = rep.violations.empty();
  return rep;
}

inline SafetyReport checkApplication(const StencilDef& s, const BoundarySpec& spec) {
  if (s.dims.rank() != spec.rank()) {
    throw Error(ErrorKind::RankMismatch, "stencil has rank " + std::to_string(s.dims.rank()) +
                                             " but boundary has rank " + std::to_string(spec.rank()));
  }
  return checkAccesses(s.accessSet, spec.regionSet());
}

/// Brute-force test oracle: marks the extent and every region cell defined,
/// then asks whether each cursor position plus each access lands on a
/// defined cell.
inline bool coverageOracle(const std::set<RelIndex>& access, const std::set<RelIndex>& regions,
                           const AbsIndex& lower, const AbsIndex& upper) {
  std::size_t rank = lower.rank();
  std::set<AbsIndex> defined;
  std::vector<AbsIndex> interior;
  for (const RegionCell& c : enumerateRegionCells(relToDescriptor(RelIndex::zero(rank)), lower, upper)) {
    defined.insert(c.cell);
    interior.push_back(c.cell);
  }
  for (const RelIndex& r : regions)
    for (const RegionCell& c : enumerateRegionCells(relToDescriptor(r), lower, upper))
      defined.insert(c.cell);
  for (const AbsIndex& p : interior)
    for (const RelIndex& a : access)
      if (!defined.count(p + a)) return false;
  return true;
}

}  // namespace ypnos

#endif  // YPNOS_SAFETY_HPP
