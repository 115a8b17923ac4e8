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

#include <algorithm>
#include <cstring>
#include <random>

#include "support.hpp"
#include "ypnos/gridfile.hpp"
#include "ypnos/bench.hpp"

using namespace ypnos;
using namespace ypnos::bench;

namespace {

bool sameBits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST(Kernels, Coefficients) {
  Kernel lap = laplaceKernel();
  EXPECT_EQ(lap.coefficient(RelIndex{0, 0}), -4.0);
  for (RelIndex r : {RelIndex{1, 0}, RelIndex{-1, 0}, RelIndex{0, 1}, RelIndex{0, -1}})
    EXPECT_EQ(lap.coefficient(r), 1.0);
  Kernel log = logKernel();
  EXPECT_EQ(log.coefficient(RelIndex{0, 0}), 16.0);
  EXPECT_EQ(log.coefficient(RelIndex{-2, 0}), -1.0);
  EXPECT_EQ(log.coefficient(RelIndex{0, 1}), -2.0);
  EXPECT_EQ(log.coefficient(RelIndex{2, 2}), 0.0);
  EXPECT_EQ(log.reach(), 2);
  EXPECT_EQ(lap.accessOffsets.size(), lap.coefficients.size());
}

TEST(Kernels, LogMatchesPrintedMatrixAndSumsToZero) {
  const double printed[25] = {0, 0, -1, 0, 0, 0, -1, -2, -1, 0, -1, -2, 16, -2, -1,
                              0, -1, -2, -1, 0, 0, 0, -1, 0, 0};
  Kernel log = logKernel();
  std::vector<double> got, want(printed, printed + 25);
  double sum = 0.0;
  for (std::int64_t y = -2; y <= 2; ++y)
    for (std::int64_t x = -2; x <= 2; ++x) {
      got.push_back(log.coefficient(RelIndex{x, y}));
      sum += got.back();
    }
  EXPECT_EQ(got, want);
  EXPECT_EQ(sum, 0.0);
}

TEST(Reference, ConstantFieldGivesZeros) {
  for (const Kernel& k : {laplaceKernel(), logKernel()}) {
    std::int64_t d = k.reach();
    // Constant everywhere including the halo so every cell sees a flat field.
    PaddedField f{6, 5, d, std::vector<double>(static_cast<std::size_t>((6 + 2 * d) * (5 + 2 * d)), 3.0)};
    for (double x : referenceKernelChecked(k, f).interior()) EXPECT_EQ(x, 0.0);
    for (double x : referenceKernelUnchecked(k, f).interior()) EXPECT_EQ(x, 0.0);
  }
}

TEST(Reference, ThreeByThree) {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9};
  PaddedField out = referenceKernelChecked(laplaceKernel(), makePadded(3, 3, 1, v));
  EXPECT_EQ(out.at(1, 1), 0.0);
  EXPECT_EQ(out.at(0, 0), 2.0);
}

TEST(Reference, CheckedEqualsUnchecked) {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 1000; ++n) {
    const Kernel k = n % 2 ? logKernel() : laplaceKernel();
    PaddedField f = makePadded(16, 16, k.reach(), randomField(256, rng()));
    EXPECT_TRUE(sameBits(referenceKernelChecked(k, f).data, referenceKernelUnchecked(k, f).data));
  }
}

TEST(Reference, DslMatchesBitForBit) {
  for (const Kernel& k : {laplaceKernel(), logKernel()}) {
    Program prog = parseProgram(kernelProgram(k));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto init = randomField(32 * 32, seed);
      auto dsl = iterateDsl(prog, k, 32, init, 3);
      auto ref = iterateReference(referenceKernelChecked, k, 32, init, 3);
      EXPECT_TRUE(sameBits(dsl, ref)) << k.name;
    }
  }
}

TEST(Reference, CorpusLogProgramMatchesGenerated) {
  Program file = parseProgram(readFileBytes(std::string(YPNOS_SOURCE_DIR) + "/programs/log.yp"));
  Program gen = parseProgram(kernelProgram(logKernel()));
  EXPECT_TRUE(stencilEqual(file.stencil("log"), gen.stencil("log")));
  EXPECT_TRUE(specEqual(file.boundary("zero"), gen.boundary("zero")));
  EXPECT_EQ(kernelBody(laplaceKernel()), "t + l + r + b - 4.0*c");
}

TEST(Strategies, IdenticalOutputs) {
  Kernel k = laplaceKernel();
  PaddedField f = makePadded(20, 13, 1, randomField(260, 77));
  auto a = referenceKernelUnchecked(k, f).data;
  EXPECT_TRUE(sameBits(a, laplaceCoordinateIndexing(k, f).data));
  EXPECT_TRUE(sameBits(a, laplaceListIndexing(k, f).data));
  EXPECT_TRUE(sameBits(a, referenceKernelChecked(k, f).data));
}

TEST(Harness, SmokeRuns) {
  BenchResult r = indexStrategyBench(8, 1, 1);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_TRUE(r.identical);
  BenchResult kb = kernelBench(logKernel(), 8, 2, 1);
  ASSERT_EQ(kb.rows.size(), 3u);
  EXPECT_TRUE(kb.identical);
  EXPECT_EQ(kb.rows[2].ratio, 1.0);
  std::string table = formatTable(kb.rows);
  EXPECT_NE(table.find("reference-unchecked"), std::string::npos);
  EXPECT_EQ(formatCsv(kb.rows).substr(0, 8), "variant,");
}

TEST(Harness, DifferenceMethod) {
  // A fake variant whose cost is setup + per-iteration work in "ticks".
  int calls = 0;
  TimingRow row = timeVariant("fake", [&](int it) {
    ++calls;
    volatile double sink = 0;
    for (int i = 0; i < it * 20000; ++i) sink = sink + 1.0;
    return std::vector<double>{static_cast<double>(it)};
  }, 4, 3);
  EXPECT_EQ(calls, 6);
  EXPECT_EQ(row.output, std::vector<double>{5.0});
  EXPECT_NEAR(row.perIter, (row.tK1 - row.t1) / 4, 1e-15);
  EXPECT_EQ(sig4(1.23456), "1.235");
}
