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

// Subcommand bodies for the ypnosc tool. Each returns the process exit code:
// 0 success, 1 rejected by the safety checker (or a failed bench
// cross-check), 2 anything else (I/O, parse, type errors).

#ifndef YPNOS_CLI_HPP
#define YPNOS_CLI_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>

#include "ypnos/bench.hpp"
#include "ypnos/gridfile.hpp"
#include "ypnos/runtime.hpp"
#include "ypnos/safety.hpp"
#include "ypnos/syntax.hpp"

namespace ypnos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRejected = 1;
inline constexpr int kExitError = 2;

inline Program loadProgram(const std::string& path) { return parseProgram(readFileBytes(path)); }

inline int reportError(std::ostream& err, const Error& e) {
  err << "error: " << e.what() << "\n";
  return e.kind() == ErrorKind::SafetyViolation ? kExitRejected : kExitError;
}

inline int cmdCheck(const std::string& programPath, const std::string& stencilName,
                    const std::string& boundaryName, std::ostream& out, std::ostream& err) {
  try {
    Program p = loadProgram(programPath);
    SafetyReport rep = checkApplication(p.stencil(stencilName), p.boundary(boundaryName));
    if (rep.ok) {
      out << "OK\n";
      return kExitOk;
    }
    for (const auto& v : rep.violations) out << formatViolation(v) << "\n";
    return kExitRejected;
  } catch (const Error& e) {
    return reportError(err, e);
  }
}

namespace detail {

template <class T>
GridData applyIterations(const StencilDef& s, const BoundarySpec& b, const GridData& in,
                         const std::vector<T>& values, std::int64_t iterations) {
  BasicGrid<T> g = makeGridFromList(s.dims, in.lower, in.upper, values, b);
  for (std::int64_t i = 0; i < iterations; ++i) g = runA(s, g);
  GridData out = in;
  out.values = g.interior();
  return out;
}

}  // namespace detail

/// Loads `inputPath`, applies the stencil `iterations` times and writes the
/// interior to `outputPath`, in the input's format unless `format` says
/// otherwise.
inline int cmdRun(const std::string& programPath, const std::string& stencilName,
                  const std::string& boundaryName, const std::string& inputPath, std::int64_t iterations,
                  const std::string& outputPath, std::optional<GridFormat> format, std::ostream& out,
                  std::ostream& err) {
  (void)out;
  try {
    if (iterations < 0) throw Error(ErrorKind::IoError, "iterations must be non-negative");
    Program p = loadProgram(programPath);
    const StencilDef& s = p.stencil(stencilName);
    const BoundarySpec& b = p.boundary(boundaryName);
    SafetyReport rep = checkApplication(s, b);
    if (!rep.ok) {
      for (const auto& v : rep.violations) err << formatViolation(v) << "\n";
      return kExitRejected;
    }
    GridData in = readGridFile(inputPath);
    if (in.rank() != s.dims.rank()) {
      throw Error(ErrorKind::RankMismatch, "grid file has rank " + std::to_string(in.rank()) +
                                               " but stencil has rank " + std::to_string(s.dims.rank()));
    }
    auto start = std::chrono::steady_clock::now();
    GridData result = std::visit(
        [&](const auto& values) { return detail::applyIterations(s, b, in, values, iterations); }, in.values);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (format) result.format = *format;
    writeGridFile(outputPath, result);
    err << "total " << bench::sig4(secs) << " s";
    if (iterations > 0) err << ", mean " << bench::sig4(secs / static_cast<double>(iterations)) << " s/iteration";
    err << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return reportError(err, e);
  }
}

inline int emitBench(const bench::BenchResult& r, bool csv, std::ostream& out, std::ostream& err) {
  out << bench::formatTable(r.rows);
  if (csv) out << "\n" << bench::formatCsv(r.rows);
  out << "outputs bit-identical: " << (r.identical ? "yes" : "NO") << "\n";
  if (!r.identical) {
    err << "error: timed variants disagree\n";
    return kExitRejected;
  }
  return kExitOk;
}

inline int cmdBench(const std::string& kernel, std::int64_t n, int iterations, bool csv, int runs,
                    std::ostream& out, std::ostream& err) {
  try {
    bench::Kernel k = bench::kernelByName(kernel);
    out << "kernel " << k.name << ", " << n << "x" << n << ", K=" << iterations << ", " << runs
        << " runs; mean/iter = (t(K+1) - t(1)) / K\n";
    return emitBench(bench::kernelBench(k, n, iterations, runs), csv, out, err);
  } catch (const Error& e) {
    return reportError(err, e);
  }
}

inline int cmdBenchIndex(std::int64_t n, int iterations, bool csv, int runs, std::ostream& out,
                         std::ostream& err) {
  try {
    out << "laplace indexing strategies, " << n << "x" << n << ", K=" << iterations << ", " << runs
        << " runs\n";
    return emitBench(bench::indexStrategyBench(n, iterations, runs), csv, out, err);
  } catch (const Error& e) {
    return reportError(err, e);
  }
}

}  // namespace ypnos::cli

#endif  // YPNOS_CLI_HPP
