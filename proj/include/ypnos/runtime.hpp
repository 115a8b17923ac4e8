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

// Grids and stencil application.
//
// A grid stores its interior plus halo in one contiguous buffer covering
// [storageLower, storageUpper] (both inclusive). The first-named dimension
// varies fastest. Relative accesses become a precomputed linear offset, so
// the inner loop of runA is a handful of unchecked loads per cell. That is
// sound exactly when checkApplication accepted the stencil.

#ifndef YPNOS_RUNTIME_HPP
#define YPNOS_RUNTIME_HPP

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "ypnos/boundary.hpp"
#include "ypnos/core.hpp"
#include "ypnos/expr.hpp"
#include "ypnos/safety.hpp"
#include "ypnos/syntax.hpp"

namespace ypnos {

enum class Materialize { Static, Dynamic, Both };

template <class T>
class BasicGrid {
  static_assert(std::is_same_v<T, double> || std::is_same_v<T, std::int64_t>,
                "grids hold Float64 or Int64");

 public:
  using value_type = T;

  BasicGrid(DimSpec dims, AbsIndex lower, AbsIndex upper, std::shared_ptr<const BoundarySpec> spec)
      : dims_(std::move(dims)),
        extentLower_(lower),
        extentUpper_(upper),
        storageLower_(lower),
        storageUpper_(upper),
        cursor_(lower),
        spec_(std::move(spec)) {
    std::size_t rank = dims_.rank();
    if (lower.rank() != rank || upper.rank() != rank || spec_->rank() != rank)
      throw Error(ErrorKind::RankMismatch, "grid bounds, dimensions and boundary disagree on rank");
    if (spec_->elemType() != elemTypeOf<T>) {
      throw Error(ErrorKind::ElemTypeMismatch,
                  "boundary element type " + std::string(elemTypeName(spec_->elemType())) +
                      " does not match grid element type " + std::string(elemTypeName(elemTypeOf<T>)));
    }
    std::int64_t stride = 1;
    for (std::size_t d = 0; d < rank; ++d) {
      if (upper[d] <= lower[d])
        throw Error(ErrorKind::DegenerateExtent, "extent is empty in dimension " + dims_.names()[d]);
      storageLower_[d] = lower[d] + spec_->haloLower()[d];
      storageUpper_[d] = upper[d] - 1 + spec_->haloUpper()[d];
      shape_[d] = storageUpper_[d] - storageLower_[d] + 1;
      strides_[d] = stride;
      stride *= shape_[d];
    }
    data_.assign(static_cast<std::size_t>(stride), T{});
  }

  const DimSpec& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.rank(); }
  const AbsIndex& extentLower() const noexcept { return extentLower_; }
  const AbsIndex& extentUpper() const noexcept { return extentUpper_; }
  const AbsIndex& storageLower() const noexcept { return storageLower_; }
  const AbsIndex& storageUpper() const noexcept { return storageUpper_; }
  const AbsIndex& cursor() const noexcept { return cursor_; }
  void setCursor(const AbsIndex& c) { cursor_ = c; }
  const BoundarySpec& spec() const noexcept { return *spec_; }
  const std::shared_ptr<const BoundarySpec>& specPtr() const noexcept { return spec_; }
  Dynamism dynamism() const noexcept { return spec_->dynamism(); }

  const std::vector<T>& data() const noexcept { return data_; }
  std::vector<T>& data() noexcept { return data_; }
  std::int64_t stride(std::size_t d) const noexcept { return strides_[d]; }

  std::int64_t linearOffset(const AbsIndex& a) const noexcept {
    std::int64_t off = 0;
    for (std::size_t d = 0; d < rank(); ++d) off += (a[d] - storageLower_[d]) * strides_[d];
    return off;
  }

  std::int64_t relativeOffset(const RelIndex& r) const noexcept {
    std::int64_t off = 0;
    for (std::size_t d = 0; d < rank(); ++d) off += r[d] * strides_[d];
    return off;
  }

  bool inStorage(const AbsIndex& a) const noexcept {
    if (a.rank() != rank()) return false;
    for (std::size_t d = 0; d < rank(); ++d)
      if (a[d] < storageLower_[d] || a[d] > storageUpper_[d]) return false;
    return true;
  }

  bool inExtent(const AbsIndex& a) const noexcept {
    if (a.rank() != rank()) return false;
    for (std::size_t d = 0; d < rank(); ++d)
      if (a[d] < extentLower_[d] || a[d] >= extentUpper_[d]) return false;
    return true;
  }

  /// Raw access to any storage cell; callers guarantee inStorage(a).
  T& cell(const AbsIndex& a) noexcept { return data_[static_cast<std::size_t>(linearOffset(a))]; }
  const T& cell(const AbsIndex& a) const noexcept {
    return data_[static_cast<std::size_t>(linearOffset(a))];
  }

  /// Interior values in storage order (first dimension fastest).
  std::vector<T> interior() const {
    std::vector<T> out;
    forEachInExtent([&](const AbsIndex& p) { out.push_back(cell(p)); });
    return out;
  }

  template <class F>
  void forEachInExtent(F&& f) const {
    AbsIndex p = extentLower_;
    for (;;) {
      f(static_cast<const AbsIndex&>(p));
      std::size_t d = 0;
      while (d < rank() && ++p[d] == extentUpper_[d]) p[d] = extentLower_[d], ++d;
      if (d == rank()) return;
    }
  }

 private:
  DimSpec dims_;
  AbsIndex extentLower_, extentUpper_, storageLower_, storageUpper_, cursor_;
  std::array<std::int64_t, kMaxRank> shape_{};
  std::array<std::int64_t, kMaxRank> strides_{};
  std::vector<T> data_;
  std::shared_ptr<const BoundarySpec> spec_;
};

using Grid = BasicGrid<double>;
using IntGrid = BasicGrid<std::int64_t>;
using AnyGrid = std::variant<Grid, IntGrid>;

template <class T>
AbsIndex sizeOf(const BasicGrid<T>& g) {
  AbsIndex s = g.extentUpper();
  for (std::size_t d = 0; d < g.rank(); ++d) s[d] -= g.extentLower()[d];
  return s;
}

/// The `!!!` operator: bounds-checked against the whole storage region.
template <class T>
T indexAbsChecked(const BasicGrid<T>& g, const AbsIndex& a) {
  if (a.rank() != g.rank())
    throw Error(ErrorKind::RankMismatch, "index " + formatAbs(a) + " has the wrong rank");
  if (!g.inStorage(a)) {
    throw Error(ErrorKind::OutOfBoundsAccess, "index " + formatAbs(a) + " outside " +
                                                  formatAbs(g.storageLower()) + ".." +
                                                  formatAbs(g.storageUpper()));
  }
  return g.cell(a);
}

/// Unchecked relative read at the cursor. Sound only under a passed safety
/// check; debug builds assert the buffer bound.
template <class T>
T indexRel(const BasicGrid<T>& g, const RelIndex& r) {
  std::int64_t off = g.linearOffset(g.cursor()) + g.relativeOffset(r);
  assert(off >= 0 && off < static_cast<std::int64_t>(g.data().size()));
  return g.data()[static_cast<std::size_t>(off)];
}

namespace detail {

template <class T>
class GridView final : public GridBinding {
 public:
  explicit GridView(const BasicGrid<T>& g) : g_(g) {}
  std::size_t rank() const override { return g_.rank(); }
  AbsIndex extentSize() const override { return sizeOf(g_); }
  Value at(const AbsIndex& a) const override { return Value(indexAbsChecked(g_, a)); }

 private:
  const BasicGrid<T>& g_;
};

template <class T>
T coerce(const Value& v, const char* what) {
  if constexpr (std::is_same_v<T, double>) {
    if (v.isFloat()) return v.asFloat();
    if (v.isInt()) return static_cast<double>(v.asInt());
  } else {
    if (v.isInt()) return v.asInt();
    if (v.isFloat())
      throw Error(ErrorKind::ElemTypeMismatch, std::string(what) + " yields Double for an Int grid");
  }
  throw Error(ErrorKind::TypeMismatch, std::string(what) + " yields a tuple, not a grid element");
}

}  // namespace detail

/// Evaluates the selected clauses into the halo, in clause order.
template <class T>
void materializeBoundary(BasicGrid<T>& g, Materialize which) {
  detail::GridView<T> view(g);
  for (const BoundaryClause& c : g.spec().clauses()) {
    bool dyn = c.dynamic();
    if ((which == Materialize::Static && dyn) || (which == Materialize::Dynamic && !dyn)) continue;
    std::string what = "boundary clause " + formatDescriptor(c.descriptor);
    for (const RegionCell& rc : enumerateRegionCells(c.descriptor, g.extentLower(), g.extentUpper())) {
      Env env;
      for (const auto& [v, x] : rc.bindings) env.vars.emplace(v, Value(x));
      if (dyn) {
        env.grid = &view;
        env.gridName = *c.gridParam;
      }
      T value = detail::coerce<T>(evalExpr(c.body, env), what.c_str());
      g.cell(rc.cell) = value;
    }
  }
}

/// Builds a grid from interior values in storage order (first-named dimension
/// fastest, last-named slowest).
template <class T>
BasicGrid<T> makeGridFromList(const DimSpec& dims, const AbsIndex& lower, const AbsIndex& upper,
                              const std::vector<T>& values, const BoundarySpec& spec) {
  BasicGrid<T> g(dims, lower, upper, std::make_shared<const BoundarySpec>(spec));
  std::size_t expected = 1;
  for (std::int64_t s : sizeOf(g)) expected *= static_cast<std::size_t>(s);
  if (values.size() != expected) {
    throw Error(ErrorKind::SizeMismatch, "expected " + std::to_string(expected) + " values, got " +
                                             std::to_string(values.size()));
  }
  std::size_t k = 0;
  g.forEachInExtent([&](const AbsIndex& p) { g.cell(p) = values[k++]; });
  materializeBoundary(g, Materialize::Both);
  return g;
}

template <class T>
BasicGrid<T> makeGridFromPairs(const DimSpec& dims, const AbsIndex& lower, const AbsIndex& upper,
                               const std::vector<std::pair<AbsIndex, T>>& pairs,
                               const BoundarySpec& spec) {
  BasicGrid<T> g(dims, lower, upper, std::make_shared<const BoundarySpec>(spec));
  std::vector<bool> seen(g.data().size(), false);
  for (const auto& [a, v] : pairs) {
    if (!g.inExtent(a))
      throw Error(ErrorKind::IndexOutsideExtent, "cell " + formatAbs(a) + " lies outside the extent");
    auto off = static_cast<std::size_t>(g.linearOffset(a));
    if (seen[off]) throw Error(ErrorKind::DuplicateCell, "cell " + formatAbs(a) + " assigned twice");
    seen[off] = true;
    g.data()[off] = v;
  }
  g.forEachInExtent([&](const AbsIndex& p) {
    if (!seen[static_cast<std::size_t>(g.linearOffset(p))])
      throw Error(ErrorKind::MissingCell, "cell " + formatAbs(p) + " never assigned");
  });
  materializeBoundary(g, Materialize::Both);
  return g;
}

template <class T>
BasicGrid<T> makeGridNoBoundary(const DimSpec& dims, const AbsIndex& lower, const AbsIndex& upper,
                                const std::vector<T>& values) {
  return makeGridFromList(dims, lower, upper, values, BoundarySpec::empty(dims.rank(), elemTypeOf<T>));
}

// ---------------------------------------------------------------------------
// Application
// ---------------------------------------------------------------------------

/// Per-access bookkeeping used to audit the unchecked path. `outOfBuffer`
/// counts linear offsets outside the allocation; `undefined` counts reads of
/// storage cells that are neither interior nor covered by a region.
struct AccessAudit {
  std::uint64_t accesses = 0;
  std::uint64_t outOfBuffer = 0;
  std::uint64_t undefined = 0;
};

/// Rewrites a stencil whose dimension names are a permutation of `target` so
/// its offsets follow `target`'s order.
inline StencilDef alignStencil(const StencilDef& s, const DimSpec& target) {
  if (s.dims == target) return s;
  if (s.dims.rank() != target.rank())
    throw Error(ErrorKind::RankMismatch, "stencil rank " + std::to_string(s.dims.rank()) +
                                             " differs from grid rank " + std::to_string(target.rank()));
  std::vector<std::size_t> from(target.rank());
  for (std::size_t d = 0; d < target.rank(); ++d) {
    const auto& names = s.dims.names();
    auto it = std::find(names.begin(), names.end(), target.names()[d]);
    if (it == names.end())
      throw Error(ErrorKind::RankMismatch, "grid dimension " + target.names()[d] + " not used by stencil");
    from[d] = static_cast<std::size_t>(it - names.begin());
  }
  StencilDef out;
  out.dims = target;
  out.body = s.body;
  for (const auto& [n, r] : s.bindings) {
    RelIndex q(target.rank());
    for (std::size_t d = 0; d < target.rank(); ++d) q[d] = r[from[d]];
    out.bindings.emplace(n, q);
    out.accessSet.insert(q);
  }
  return out;
}

namespace detail {

template <class T>
void requireSafe(const StencilDef& s, const BasicGrid<T>& g) {
  SafetyReport rep = checkApplication(s, g.spec());
  if (!rep.ok) {
    std::string msg;
    for (const auto& v : rep.violations) msg += (msg.empty() ? "" : "; ") + formatViolation(v);
    throw Error(ErrorKind::SafetyViolation, msg);
  }
}

// Storage cells holding values defined by construction: interior plus every
// region cell.
template <class T>
std::vector<bool> definedMask(const BasicGrid<T>& g) {
  std::vector<bool> mask(g.data().size(), false);
  g.forEachInExtent([&](const AbsIndex& p) { mask[static_cast<std::size_t>(g.linearOffset(p))] = true; });
  for (const RelIndex& r : g.spec().regionSet())
    for (const RegionCell& c : enumerateRegionCells(relToDescriptor(r), g.extentLower(), g.extentUpper()))
      mask[static_cast<std::size_t>(g.linearOffset(c.cell))] = true;
  return mask;
}

/// Evaluates the body at every interior cursor of `in`, handing each result
/// to `emit(linearOffsetInInput, value)`. The compiled path reads slots via
/// precomputed offsets; bodies with tuples fall back to the tree walker.
template <class R, class T, class Emit>
void interiorPass(const StencilDef& s, const BasicGrid<T>& in, AccessAudit* audit, Emit&& emit) {
  std::vector<std::string> slots = s.slotNames();
  std::vector<std::int64_t> offs;
  for (const auto& [n, r] : s.bindings) offs.push_back(in.relativeOffset(r));
  const T* base = in.data().data();
  const auto size = static_cast<std::int64_t>(in.data().size());
  std::vector<bool> mask;
  if (audit) mask = definedMask(in);
  std::vector<T> vals(slots.size());

  auto load = [&](std::int64_t at) {
    for (std::size_t k = 0; k < offs.size(); ++k) {
      std::int64_t o = at + offs[k];
      if (audit) {
        ++audit->accesses;
        if (o < 0 || o >= size) {
          ++audit->outOfBuffer;
          vals[k] = T{};
          continue;
        }
        if (!mask[static_cast<std::size_t>(o)]) ++audit->undefined;
      }
      assert(o >= 0 && o < size);
      vals[k] = base[o];
    }
  };

  auto compiled = CompiledExpr::compile(s.body, slots, elemTypeOf<T>);
  if (compiled) {
    std::vector<CompiledExpr::Scalar> stack(std::max<std::size_t>(compiled->stackDepth(), 1));
    bool fromInt = compiled->resultType() == ElemType::Int64;
    in.forEachInExtent([&](const AbsIndex& p) {
      std::int64_t at = in.linearOffset(p);
      load(at);
      CompiledExpr::Scalar v = compiled->run(vals.data(), stack.data());
      if constexpr (std::is_same_v<R, double>)
        emit(at, fromInt ? static_cast<double>(v.i) : v.f);
      else
        emit(at, v.i);
    });
    return;
  }
  Env env;
  in.forEachInExtent([&](const AbsIndex& p) {
    std::int64_t at = in.linearOffset(p);
    load(at);
    for (std::size_t k = 0; k < slots.size(); ++k) env.vars.insert_or_assign(slots[k], Value(vals[k]));
    emit(at, coerce<R>(evalExpr(s.body, env), "stencil body"));
  });
}

template <class T>
ElemType resultTypeOf(const StencilDef& s) {
  auto compiled = CompiledExpr::compile(s.body, s.slotNames(), elemTypeOf<T>);
  if (compiled) return compiled->resultType();
  // Tuple-using bodies: type of a sample evaluation on zeros.
  Env env;
  for (const auto& n : s.slotNames()) env.vars.emplace(n, Value(T{}));
  try {
    Value v = evalExpr(s.body, env);
    if (v.isInt()) return ElemType::Int64;
  } catch (const Error&) {
  }
  return ElemType::Float64;
}

}  // namespace detail

/// Applies `s` at every interior cell. The result keeps g's extent and
/// boundary: a static halo is copied, a dynamic one is recomputed from the
/// new interior. Int results promote into a Double grid; Double results in an
/// Int grid are rejected.
template <class T>
BasicGrid<T> runA(const StencilDef& stencil, const BasicGrid<T>& g, AccessAudit* audit = nullptr) {
  StencilDef s = alignStencil(stencil, g.dims());
  detail::requireSafe(s, g);
  if constexpr (std::is_same_v<T, std::int64_t>) {
    if (detail::resultTypeOf<T>(s) != ElemType::Int64)
      throw Error(ErrorKind::ElemTypeMismatch, "stencil yields Double on an Int grid; use run");
  }
  BasicGrid<T> out = g;
  T* dst = out.data().data();
  detail::interiorPass<T>(s, g, audit, [&](std::int64_t at, T v) { dst[at] = v; });
  if (g.dynamism() == Dynamism::Dynamic) materializeBoundary(out, Materialize::Dynamic);
  out.setCursor(g.extentLower());
  return out;
}

/// Applies `s` and drops the boundary. The element type follows the body.
template <class T>
AnyGrid run(const StencilDef& stencil, const BasicGrid<T>& g, AccessAudit* audit = nullptr) {
  StencilDef s = alignStencil(stencil, g.dims());
  detail::requireSafe(s, g);
  auto go = [&](auto tag) -> AnyGrid {
    using R = decltype(tag);
    BasicGrid<R> out(g.dims(), g.extentLower(), g.extentUpper(),
                     std::make_shared<const BoundarySpec>(BoundarySpec::empty(g.rank(), elemTypeOf<R>)));
    // No halo on the result, so storage order is interior order.
    R* dst = out.data().data();
    detail::interiorPass<R>(s, g, audit, [&](std::int64_t, R v) { *dst++ = v; });
    return out;
  };
  if (detail::resultTypeOf<T>(s) == ElemType::Int64) return go(std::int64_t{});
  return go(double{});
}

}  // namespace ypnos

#endif  // YPNOS_RUNTIME_HPP
