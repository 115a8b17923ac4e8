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

#ifndef YPNOS_CORE_HPP
#define YPNOS_CORE_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace ypnos {

inline constexpr std::size_t kMaxRank = 3;

enum class ErrorKind {
  SyntaxError,
  UndeclaredDimension,
  DuplicateName,
  MissingCursor,
  MultipleCursors,
  RaggedRows,
  EmptyRange,
  MalformedRange,
  MalformedRegion,
  DuplicateRegion,
  MixedRank,
  RankMismatch,
  UnboundVariable,
  IllegalBuiltin,
  TypeMismatch,
  DivisionByZero,
  OutOfBoundsAccess,
  SizeMismatch,
  ElemTypeMismatch,
  MissingCell,
  DuplicateCell,
  IndexOutsideExtent,
  DegenerateExtent,
  SafetyViolation,
  UnknownName,
  IoError,
};

inline std::string_view errorKindName(ErrorKind k) {
  switch (k) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UndeclaredDimension: return "UndeclaredDimension";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::MissingCursor: return "MissingCursor";
    case ErrorKind::MultipleCursors: return "MultipleCursors";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::EmptyRange: return "EmptyRange";
    case ErrorKind::MalformedRange: return "MalformedRange";
    case ErrorKind::MalformedRegion: return "MalformedRegion";
    case ErrorKind::DuplicateRegion: return "DuplicateRegion";
    case ErrorKind::MixedRank: return "MixedRank";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::IllegalBuiltin: return "IllegalBuiltin";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::OutOfBoundsAccess: return "OutOfBoundsAccess";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::ElemTypeMismatch: return "ElemTypeMismatch";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::DuplicateCell: return "DuplicateCell";
    case ErrorKind::IndexOutsideExtent: return "IndexOutsideExtent";
    case ErrorKind::DegenerateExtent: return "DegenerateExtent";
    case ErrorKind::SafetyViolation: return "SafetyViolation";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// The single exception type of the library. `kind()` identifies the failure
/// class; the message is meant for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(errorKindName(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Indices
// ---------------------------------------------------------------------------

struct RelTag {};
struct AbsTag {};

/// Fixed-capacity integer vector of rank 1..kMaxRank. The tag keeps relative
/// offsets and absolute coordinates from being mixed up.
template <class Tag>
class BasicIndex {
 public:
  BasicIndex() = default;

  explicit BasicIndex(std::size_t rank) : rank_(static_cast<std::uint8_t>(checkRank(rank))) {}

  BasicIndex(std::initializer_list<std::int64_t> values)
      : rank_(static_cast<std::uint8_t>(checkRank(values.size()))) {
    std::copy(values.begin(), values.end(), v_.begin());
  }

  static BasicIndex fromVector(const std::vector<std::int64_t>& values) {
    BasicIndex r(values.size());
    std::copy(values.begin(), values.end(), r.v_.begin());
    return r;
  }

  static BasicIndex zero(std::size_t rank) { return BasicIndex(rank); }

  std::size_t rank() const noexcept { return rank_; }
  std::int64_t operator[](std::size_t d) const noexcept { return v_[d]; }
  std::int64_t& operator[](std::size_t d) noexcept { return v_[d]; }

  const std::int64_t* begin() const noexcept { return v_.data(); }
  const std::int64_t* end() const noexcept { return v_.data() + rank_; }

  bool isZero() const noexcept {
    return std::all_of(begin(), end(), [](std::int64_t x) { return x == 0; });
  }

  std::vector<std::int64_t> toVector() const { return {begin(), end()}; }

  friend bool operator==(const BasicIndex& a, const BasicIndex& b) noexcept {
    return a.rank_ == b.rank_ && std::equal(a.begin(), a.end(), b.begin());
  }

  // Lexicographic over components; lower rank sorts first.
  friend std::strong_ordering operator<=>(const BasicIndex& a, const BasicIndex& b) noexcept {
    if (auto c = a.rank_ <=> b.rank_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

 private:
  static std::size_t checkRank(std::size_t rank) {
    if (rank < 1 || rank > kMaxRank) {
      throw Error(ErrorKind::RankMismatch,
                  "rank " + std::to_string(rank) + " outside supported range 1.." +
                      std::to_string(kMaxRank));
    }
    return rank;
  }

  std::array<std::int64_t, kMaxRank> v_{};
  std::uint8_t rank_ = 0;
};

using RelIndex = BasicIndex<RelTag>;
using AbsIndex = BasicIndex<AbsTag>;

inline AbsIndex operator+(const AbsIndex& a, const RelIndex& r) {
  if (a.rank() != r.rank()) throw Error(ErrorKind::RankMismatch, "index rank mismatch");
  AbsIndex out = a;
  for (std::size_t d = 0; d < a.rank(); ++d) out[d] += r[d];
  return out;
}

inline RelIndex operator-(const RelIndex& r) {
  RelIndex out = r;
  for (std::size_t d = 0; d < r.rank(); ++d) out[d] = -out[d];
  return out;
}

/// Signed notation, e.g. `(-1,0,+2)`.
inline std::string formatRel(const RelIndex& r) {
  std::string s = "(";
  for (std::size_t d = 0; d < r.rank(); ++d) {
    if (d) s += ",";
    if (r[d] > 0) s += "+";
    s += std::to_string(r[d]);
  }
  return s + ")";
}

inline std::string formatAbs(const AbsIndex& a) {
  std::string s = "(";
  for (std::size_t d = 0; d < a.rank(); ++d) {
    if (d) s += ",";
    s += std::to_string(a[d]);
  }
  return s + ")";
}

inline std::ostream& operator<<(std::ostream& os, const RelIndex& r) { return os << formatRel(r); }
inline std::ostream& operator<<(std::ostream& os, const AbsIndex& a) { return os << formatAbs(a); }

struct IndexHash {
  template <class Tag>
  std::size_t operator()(const BasicIndex<Tag>& i) const noexcept {
    std::size_t h = i.rank();
    for (std::int64_t x : i) h = h * 1000003u ^ std::hash<std::int64_t>{}(x);
    return h;
  }
};

// ---------------------------------------------------------------------------
// Dimensions
// ---------------------------------------------------------------------------

/// Ordered dimension names; the first name is the fastest-varying storage axis.
class DimSpec {
 public:
  DimSpec() = default;

  explicit DimSpec(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty() || names_.size() > kMaxRank) {
      throw Error(ErrorKind::RankMismatch, "dimension term must name 1.." +
                                               std::to_string(kMaxRank) + " dimensions");
    }
    for (std::size_t i = 0; i < names_.size(); ++i)
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j])
          throw Error(ErrorKind::DuplicateName, "dimension " + names_[i] + " named twice");
  }

  std::size_t rank() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  friend bool operator==(const DimSpec&, const DimSpec&) = default;

 private:
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Region descriptors
// ---------------------------------------------------------------------------

/// `-n` / `+n` component: an offset relative to the lower or upper extent edge.
struct RelComponent {
  std::int64_t offset = 0;
  friend bool operator==(const RelComponent&, const RelComponent&) = default;
};

/// `*v` component: every coordinate inside the extent, bound to `var`.
struct WildcardComponent {
  std::string var;
  friend bool operator==(const WildcardComponent&, const WildcardComponent&) = default;
};

using RegionComponent = std::variant<RelComponent, WildcardComponent>;

inline RegionComponent relComponent(std::int64_t offset) {
  if (offset == 0) {
    throw Error(ErrorKind::MalformedRegion,
                "relative region components are nonzero; use a wildcard for the interior");
  }
  return RelComponent{offset};
}

inline RegionComponent wildcard(std::string var) { return WildcardComponent{std::move(var)}; }

class RegionDescriptor {
 public:
  RegionDescriptor() = default;

  explicit RegionDescriptor(std::vector<RegionComponent> components)
      : components_(std::move(components)) {
    if (components_.empty() || components_.size() > kMaxRank)
      throw Error(ErrorKind::MalformedRegion, "region descriptor rank out of range");
    std::vector<std::string> seen;
    for (const auto& c : components_) {
      if (const auto* r = std::get_if<RelComponent>(&c); r && r->offset == 0)
        throw Error(ErrorKind::MalformedRegion, "relative region component of zero");
      if (const auto* w = std::get_if<WildcardComponent>(&c)) {
        if (std::find(seen.begin(), seen.end(), w->var) != seen.end())
          throw Error(ErrorKind::MalformedRegion, "wildcard variable " + w->var + " bound twice");
        seen.push_back(w->var);
      }
    }
  }

  std::size_t rank() const noexcept { return components_.size(); }
  const std::vector<RegionComponent>& components() const noexcept { return components_; }
  const RegionComponent& operator[](std::size_t d) const { return components_[d]; }

  bool allWildcard() const {
    return std::all_of(components_.begin(), components_.end(), [](const RegionComponent& c) {
      return std::holds_alternative<WildcardComponent>(c);
    });
  }

  friend bool operator==(const RegionDescriptor&, const RegionDescriptor&) = default;

 private:
  std::vector<RegionComponent> components_;
};

inline std::string formatDescriptor(const RegionDescriptor& d) {
  std::string s = "(";
  for (std::size_t i = 0; i < d.rank(); ++i) {
    if (i) s += ", ";
    if (const auto* r = std::get_if<RelComponent>(&d[i])) {
      s += (r->offset > 0 ? "+" : "") + std::to_string(r->offset);
    } else {
      s += "*" + std::get<WildcardComponent>(d[i]).var;
    }
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Index algebra
// ---------------------------------------------------------------------------

/// One step toward zero; zero is a fixed point.
constexpr std::int64_t pred(std::int64_t offset) noexcept {
  return offset > 0 ? offset - 1 : (offset < 0 ? offset + 1 : 0);
}

/// Wildcards become 0, relative components keep their offset.
inline RelIndex absToRel(const RegionDescriptor& d) {
  RelIndex r(d.rank());
  for (std::size_t i = 0; i < d.rank(); ++i) {
    if (const auto* c = std::get_if<RelComponent>(&d[i])) r[i] = c->offset;
  }
  return r;
}

/// Inverse of absToRel up to wildcard naming: 0 becomes `*i`, `*j`, `*k`.
inline RegionDescriptor relToDescriptor(const RelIndex& r) {
  static constexpr std::array<const char*, kMaxRank> kNames{"i", "j", "k"};
  std::vector<RegionComponent> comps;
  for (std::size_t d = 0; d < r.rank(); ++d) {
    if (r[d] == 0)
      comps.push_back(wildcard(kNames[d]));
    else
      comps.push_back(RelComponent{r[d]});
  }
  return RegionDescriptor(std::move(comps));
}

enum class Dynamism : std::uint8_t { Static = 0, Dynamic = 1 };

constexpr Dynamism joinDynamism(Dynamism a, Dynamism b) noexcept {
  return (a == Dynamism::Dynamic || b == Dynamism::Dynamic) ? Dynamism::Dynamic
                                                             : Dynamism::Static;
}

inline std::string_view dynamismName(Dynamism d) {
  return d == Dynamism::Static ? "Static" : "Dynamic";
}

struct HaloBounds {
  RelIndex lower;
  RelIndex upper;
  friend bool operator==(const HaloBounds&, const HaloBounds&) = default;
};

/// Componentwise min/max over the regions and the origin.
template <class Range>
HaloBounds haloBoundsOf(std::size_t rank, const Range& regions) {
  HaloBounds h{RelIndex::zero(rank), RelIndex::zero(rank)};
  for (const RelIndex& r : regions) {
    if (r.rank() != rank) throw Error(ErrorKind::MixedRank, "region rank differs from spec rank");
    for (std::size_t d = 0; d < rank; ++d) {
      h.lower[d] = std::min(h.lower[d], r[d]);
      h.upper[d] = std::max(h.upper[d], r[d]);
    }
  }
  return h;
}

enum class ElemType : std::uint8_t { Float64, Int64 };

inline std::string_view elemTypeName(ElemType t) {
  return t == ElemType::Float64 ? "Double" : "Int";
}

template <class T>
inline constexpr ElemType elemTypeOf = std::is_same_v<T, double> ? ElemType::Float64
                                                                 : ElemType::Int64;

}  // namespace ypnos

#endif  // YPNOS_CORE_HPP
