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

// Hand-written reference kernels and the timing harness.
//
// Every variant here and the DSL evaluate a kernel in one canonical order:
//   acc = c0*v0;  acc = acc + ck*vk  for k = 1, 2, ...
// over the kernel's nonzero terms. The generated DSL body spells the same
// sequence (`a + b - 4.0*c` style), and since x + (-(y)) == x - y and
// 1.0*y == y exactly in IEEE arithmetic, all variants agree bit-for-bit.

#ifndef YPNOS_BENCH_HPP
#define YPNOS_BENCH_HPP

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ypnos/core.hpp"
#include "ypnos/expr.hpp"
#include "ypnos/runtime.hpp"
#include "ypnos/syntax.hpp"

namespace ypnos::bench {

struct KernelTerm {
  RelIndex offset;
  double coef;
  std::string name;  // pattern variable in the generated program
};

struct Kernel {
  std::string name;
  std::vector<KernelTerm> terms;  // canonical evaluation order, nonzero only
  std::set<RelIndex> accessOffsets;
  std::map<RelIndex, double> coefficients;

  double coefficient(const RelIndex& r) const {
    auto it = coefficients.find(r);
    return it == coefficients.end() ? 0.0 : it->second;
  }

  std::int64_t reach() const {
    std::int64_t m = 0;
    for (const auto& t : terms)
      for (std::int64_t c : t.offset) m = std::max<std::int64_t>(m, c < 0 ? -c : c);
    return m;
  }
};

inline Kernel makeKernel(std::string name, std::vector<KernelTerm> terms) {
  Kernel k{std::move(name), std::move(terms), {}, {}};
  for (const auto& t : k.terms) {
    k.accessOffsets.insert(t.offset);
    k.coefficients[t.offset] = t.coef;
  }
  return k;
}

/// t + l + r + b - 4c, with x along the first dimension and y along the second.
inline Kernel laplaceKernel() {
  return makeKernel("laplace", {{RelIndex{0, -1}, 1.0, "t"},
                                {RelIndex{-1, 0}, 1.0, "l"},
                                {RelIndex{1, 0}, 1.0, "r"},
                                {RelIndex{0, 1}, 1.0, "b"},
                                {RelIndex{0, 0}, -4.0, "c"}});
}

/// 5x5 Laplacian of Gaussian; rows are y offsets -2..2, columns x offsets.
inline Kernel logKernel() {
  static constexpr double kMatrix[5][5] = {{0, 0, -1, 0, 0},
                                           {0, -1, -2, -1, 0},
                                           {-1, -2, 16, -2, -1},
                                           {0, -1, -2, -1, 0},
                                           {0, 0, -1, 0, 0}};
  std::vector<KernelTerm> terms;
  for (int row = 0; row < 5; ++row)
    for (int col = 0; col < 5; ++col)
      if (kMatrix[row][col] != 0.0)
        terms.push_back({RelIndex{col - 2, row - 2}, kMatrix[row][col],
                         "p" + std::to_string(row) + std::to_string(col)});
  return makeKernel("log", std::move(terms));
}

inline Kernel kernelByName(const std::string& name) {
  if (name == "laplace") return laplaceKernel();
  if (name == "log") return logKernel();
  throw Error(ErrorKind::UnknownName, "unknown kernel '" + name + "'");
}

// ---------------------------------------------------------------------------
// DSL program text
// ---------------------------------------------------------------------------

inline std::string kernelBody(const Kernel& k) {
  std::string out;
  for (std::size_t i = 0; i < k.terms.size(); ++i) {
    const KernelTerm& t = k.terms[i];
    double mag = std::fabs(t.coef);
    std::string term = mag == 1.0 ? t.name : formatFloat(mag) + "*" + t.name;
    if (i == 0)
      out = (t.coef < 0 ? "-" : "") + term;
    else
      out += (t.coef < 0 ? " - " : " + ") + term;
  }
  return out;
}

/// A complete program: the kernel as a flat 2D pattern plus a zero boundary
/// deep enough for its reach.
inline std::string kernelProgram(const Kernel& k) {
  std::int64_t d = k.reach();
  std::map<RelIndex, std::string> names;
  for (const auto& t : k.terms) names[t.offset] = t.name;
  std::string text = "dimensions X, Y;\n\nstencil " + k.name + " = fun X*Y:";
  for (std::int64_t y = -d; y <= d; ++y) {
    text += y == -d ? "| " : "\n      | ";
    for (std::int64_t x = -d; x <= d; ++x) {
      RelIndex r{x, y};
      auto it = names.find(r);
      std::string cell = it == names.end() ? "_" : it->second;
      text += (r.isZero() ? "@" : "") + cell + " ";
    }
    text += "|";
  }
  std::string n = std::to_string(d);
  text += " -> " + kernelBody(k) + ";\n\nboundary zero : Double = from (-" + n + ", -" + n + ") to (+" +
          n + ", +" + n + ") -> 0.0;\n";
  return text;
}

// ---------------------------------------------------------------------------
// Reference loops
// ---------------------------------------------------------------------------

/// Row-major 2D buffer of width x height interior cells surrounded by `halo`
/// cells on every side; x varies fastest.
struct PaddedField {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::int64_t halo = 0;
  std::vector<double> data;

  std::int64_t stride() const { return width + 2 * halo; }
  std::int64_t rows() const { return height + 2 * halo; }
  std::int64_t offset(std::int64_t x, std::int64_t y) const { return (y + halo) * stride() + (x + halo); }
  double& at(std::int64_t x, std::int64_t y) { return data[static_cast<std::size_t>(offset(x, y))]; }
  double at(std::int64_t x, std::int64_t y) const { return data[static_cast<std::size_t>(offset(x, y))]; }

  std::vector<double> interior() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(width * height));
    for (std::int64_t y = 0; y < height; ++y)
      for (std::int64_t x = 0; x < width; ++x) out.push_back(at(x, y));
    return out;
  }
};

/// Zero halo around the given interior values (x fastest).
inline PaddedField makePadded(std::int64_t width, std::int64_t height, std::int64_t halo,
                              const std::vector<double>& interior) {
  PaddedField f{width, height, halo, {}};
  f.data.assign(static_cast<std::size_t>(f.stride() * f.rows()), 0.0);
  std::size_t k = 0;
  for (std::int64_t y = 0; y < height; ++y)
    for (std::int64_t x = 0; x < width; ++x) f.at(x, y) = interior[k++];
  return f;
}

inline std::vector<double> randomField(std::int64_t cells, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(cells));
  for (double& x : v) x = dist(rng);
  return v;
}

/// One application, validating every load against the buffer first.
inline PaddedField referenceKernelChecked(const Kernel& k, const PaddedField& in) {
  PaddedField out = in;
  auto load = [&](std::int64_t x, std::int64_t y) {
    if (x < -in.halo || x >= in.width + in.halo || y < -in.halo || y >= in.height + in.halo)
      throw std::out_of_range("reference kernel read outside its buffer");
    return in.at(x, y);
  };
  for (std::int64_t y = 0; y < in.height; ++y) {
    for (std::int64_t x = 0; x < in.width; ++x) {
      const KernelTerm& t0 = k.terms[0];
      double acc = t0.coef * load(x + t0.offset[0], y + t0.offset[1]);
      for (std::size_t i = 1; i < k.terms.size(); ++i) {
        const KernelTerm& t = k.terms[i];
        acc = acc + t.coef * load(x + t.offset[0], y + t.offset[1]);
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

/// Same arithmetic; loads through precomputed linear offsets, no checks.
inline PaddedField referenceKernelUnchecked(const Kernel& k, const PaddedField& in) {
  PaddedField out = in;
  std::size_t n = k.terms.size();
  std::vector<std::int64_t> offs(n);
  std::vector<double> coef(n);
  for (std::size_t i = 0; i < n; ++i) {
    offs[i] = k.terms[i].offset[1] * in.stride() + k.terms[i].offset[0];
    coef[i] = k.terms[i].coef;
  }
  const double* src = in.data.data();
  double* dst = out.data.data();
  for (std::int64_t y = 0; y < in.height; ++y) {
    std::int64_t row = in.offset(0, y);
    for (std::int64_t x = 0; x < in.width; ++x) {
      const double* p = src + row + x;
      double acc = coef[0] * p[offs[0]];
      for (std::size_t i = 1; i < n; ++i) acc = acc + coef[i] * p[offs[i]];
      dst[row + x] = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Indexing strategies on the Laplace loop
// ---------------------------------------------------------------------------

namespace detail {

inline std::int64_t coordOffset(const PaddedField& f, const std::array<std::int64_t, 2>& c) {
  return (c[1] + f.halo) * f.stride() + (c[0] + f.halo);
}

// Kept out of line so the allocation cannot be elided.
[[gnu::noinline]] inline double loadViaVector(const PaddedField& f, std::vector<std::int64_t> coords) {
  std::int64_t off = 0, stride = 1;
  std::array<std::int64_t, 2> dims{f.stride(), f.rows()};
  for (std::size_t d = 0; d < coords.size(); ++d) {
    off += (coords[d] + f.halo) * stride;
    stride *= dims[d];
  }
  return f.data[static_cast<std::size_t>(off)];
}

}  // namespace detail

/// (b) coordinates rebuilt and flattened per access.
inline PaddedField laplaceCoordinateIndexing(const Kernel& k, const PaddedField& in) {
  PaddedField out = in;
  for (std::int64_t y = 0; y < in.height; ++y) {
    for (std::int64_t x = 0; x < in.width; ++x) {
      auto load = [&](const RelIndex& r) {
        std::array<std::int64_t, 2> c{x + r[0], y + r[1]};
        return in.data[static_cast<std::size_t>(detail::coordOffset(in, c))];
      };
      double acc = k.terms[0].coef * load(k.terms[0].offset);
      for (std::size_t i = 1; i < k.terms.size(); ++i) acc = acc + k.terms[i].coef * load(k.terms[i].offset);
      out.at(x, y) = acc;
    }
  }
  return out;
}

/// (c) a freshly heap-allocated coordinate sequence per access.
inline PaddedField laplaceListIndexing(const Kernel& k, const PaddedField& in) {
  PaddedField out = in;
  for (std::int64_t y = 0; y < in.height; ++y) {
    for (std::int64_t x = 0; x < in.width; ++x) {
      auto load = [&](const RelIndex& r) {
        return detail::loadViaVector(in, std::vector<std::int64_t>{x + r[0], y + r[1]});
      };
      double acc = k.terms[0].coef * load(k.terms[0].offset);
      for (std::size_t i = 1; i < k.terms.size(); ++i) acc = acc + k.terms[i].coef * load(k.terms[i].offset);
      out.at(x, y) = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

/// `run(iterations)` performs setup plus that many applications and returns
/// the final interior. Mean cost per iteration is (t(K+1) - t(1)) / K, which
/// cancels the setup cost; each time is averaged over `runs` repetitions.
struct TimingRow {
  std::string name;
  double t1 = 0.0;
  double tK1 = 0.0;
  double perIter = 0.0;
  double ratio = 0.0;
  std::vector<double> output;  // interior after K+1 iterations
};

using Variant = std::function<std::vector<double>(int)>;

inline double secondsOf(const std::function<void()>& f) {
  auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline TimingRow timeVariant(const std::string& name, const Variant& run, int K, int runs) {
  TimingRow row{name, 0.0, 0.0, 0.0, 0.0, {}};
  for (int r = 0; r < runs; ++r) {
    row.t1 += secondsOf([&] { run(1); });
    row.tK1 += secondsOf([&] { row.output = run(K + 1); });
  }
  row.t1 /= runs;
  row.tK1 /= runs;
  row.perIter = (row.tK1 - row.t1) / K;
  return row;
}

/// Fills `ratio` against the row named `baseline`.
inline void fillRatios(std::vector<TimingRow>& rows, const std::string& baseline) {
  double base = 0.0;
  for (const auto& r : rows)
    if (r.name == baseline) base = r.perIter;
  for (auto& r : rows) r.ratio = base != 0.0 ? r.perIter / base : NAN;
}

inline bool outputsIdentical(const std::vector<TimingRow>& rows) {
  for (const auto& r : rows) {
    if (r.output.size() != rows.front().output.size()) return false;
    for (std::size_t i = 0; i < r.output.size(); ++i)
      if (std::memcmp(&r.output[i], &rows.front().output[i], sizeof(double)) != 0) return false;
  }
  return true;
}

inline std::string sig4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string formatTable(const std::vector<TimingRow>& rows) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "%-22s %12s %12s %12s %10s\n", "variant", "1-iter (s)", "K+1-iter (s)",
                "mean/iter (s)", "ratio");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-22s %12s %12s %12s %10s\n", r.name.c_str(), sig4(r.t1).c_str(),
                  sig4(r.tK1).c_str(), sig4(r.perIter).c_str(), sig4(r.ratio).c_str());
    out += line;
  }
  return out;
}

inline std::string formatCsv(const std::vector<TimingRow>& rows) {
  std::string out = "variant,t1,tK1,mean_per_iter,ratio\n";
  for (const auto& r : rows)
    out += r.name + "," + sig4(r.t1) + "," + sig4(r.tK1) + "," + sig4(r.perIter) + "," + sig4(r.ratio) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// Runs `iterations` applications of a reference variant starting from a
/// fresh zero-padded field.
inline std::vector<double> iterateReference(PaddedField (*step)(const Kernel&, const PaddedField&),
                                            const Kernel& k, std::int64_t n,
                                            const std::vector<double>& init, int iterations) {
  PaddedField f = makePadded(n, n, k.reach(), init);
  for (int i = 0; i < iterations; ++i) f = step(k, f);
  return f.interior();
}

inline std::vector<double> iterateDsl(const Program& prog, const Kernel& k, std::int64_t n,
                                      const std::vector<double>& init, int iterations) {
  const StencilDef& s = prog.stencil(k.name);
  Grid g = makeGridFromList(s.dims, AbsIndex{0, 0}, AbsIndex{n, n}, init, prog.boundary("zero"));
  for (int i = 0; i < iterations; ++i) g = runA(s, g);
  return g.interior();
}

struct BenchResult {
  std::vector<TimingRow> rows;
  bool identical = false;
};

/// DSL versus the two reference loops on an n x n random field.
inline BenchResult kernelBench(const Kernel& k, std::int64_t n, int K, int runs = 10) {
  if (n < 1 || K < 1) throw Error(ErrorKind::DegenerateExtent, "bench needs N >= 1 and K >= 1");
  Program prog = parseProgram(kernelProgram(k));
  std::vector<double> init = randomField(n * n, 0x9e3779b97f4a7c15ULL);
  BenchResult res;
  res.rows.push_back(timeVariant("dsl", [&](int it) { return iterateDsl(prog, k, n, init, it); }, K, runs));
  res.rows.push_back(timeVariant(
      "reference-checked",
      [&](int it) { return iterateReference(referenceKernelChecked, k, n, init, it); }, K, runs));
  res.rows.push_back(timeVariant(
      "reference-unchecked",
      [&](int it) { return iterateReference(referenceKernelUnchecked, k, n, init, it); }, K, runs));
  fillRatios(res.rows, "reference-unchecked");
  res.identical = outputsIdentical(res.rows);
  return res;
}

/// Linear offsets versus per-access coordinates versus per-access lists.
inline BenchResult indexStrategyBench(std::int64_t n, int K, int runs = 10) {
  if (n < 1 || K < 1) throw Error(ErrorKind::DegenerateExtent, "bench needs N >= 1 and K >= 1");
  Kernel k = laplaceKernel();
  std::vector<double> init = randomField(n * n, 0x2545f4914f6cdd1dULL);
  BenchResult res;
  res.rows.push_back(timeVariant(
      "linear-offset", [&](int it) { return iterateReference(referenceKernelUnchecked, k, n, init, it); },
      K, runs));
  res.rows.push_back(timeVariant(
      "coordinate-tuple",
      [&](int it) { return iterateReference(laplaceCoordinateIndexing, k, n, init, it); }, K, runs));
  res.rows.push_back(timeVariant(
      "heap-list", [&](int it) { return iterateReference(laplaceListIndexing, k, n, init, it); }, K, runs));
  fillRatios(res.rows, "linear-offset");
  res.identical = outputsIdentical(res.rows);
  return res;
}

}  // namespace ypnos::bench

#endif  // YPNOS_BENCH_HPP
