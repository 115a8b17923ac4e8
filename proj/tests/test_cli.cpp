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
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "ypnos/cli.hpp"

using namespace ypnos;
namespace fs = std::filesystem;

namespace {

const std::string kSrc = YPNOS_SOURCE_DIR;
const std::string kLaplace = kSrc + "/programs/laplace.yp";
const std::string kLog = kSrc + "/programs/log.yp";

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("ypnosc_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int exitCodeOf(const std::string& args) {
  std::string cmd = std::string(YPNOSC_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string samplePgm(int w, int h) {
  std::string s = "P2\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (int i = 0; i < w * h; ++i) s += std::to_string((i * 37) % 256) + (i % w == w - 1 ? "\n" : " ");
  return s;
}

}  // namespace

TEST(Check, Outcomes) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmdCheck(kLaplace, "laplace2D", "laplaceBoundary", out, err), 0);
  EXPECT_EQ(out.str(), "OK\n");

  std::ostringstream out2;
  EXPECT_EQ(cli::cmdCheck(kLaplace, "laplace2D", "cornerOnly", out2, err), 1);
  EXPECT_EQ(out2.str(),
            "unsafe offset (-1,0): missing boundary region (-1,0)\n"
            "unsafe offset (0,-1): missing boundary region (0,-1)\n"
            "unsafe offset (0,+1): missing boundary region (0,+1)\n"
            "unsafe offset (+1,0): missing boundary region (+1,0)\n");

  std::ostringstream out3;
  EXPECT_EQ(cli::cmdCheck(kLaplace, "identity", "cornerOnly", out3, err), 0);
  EXPECT_EQ(cli::cmdCheck(kLog, "log", "shallow", out3, err), 1);
  EXPECT_EQ(cli::cmdCheck(kLog, "log", "zero", out3, err), 0);
  EXPECT_EQ(cli::cmdCheck(kSrc + "/nope.yp", "a", "b", out3, err), 2);
  EXPECT_EQ(cli::cmdCheck(kLaplace, "nope", "laplaceBoundary", out3, err), 2);
}

TEST(Run, PgmIdentityAndDeterminism) {
  Scratch s;
  std::string in = s.path("in.pgm");
  writeFileBytes(in, samplePgm(16, 12));
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmdRun(kLaplace, "laplace2D", "laplaceBoundary", in, 0, s.path("zero.pgm"), std::nullopt, out, err), 0);
  EXPECT_EQ(readFileBytes(s.path("zero.pgm")), samplePgm(16, 12));

  EXPECT_EQ(cli::cmdRun(kLaplace, "laplace2D", "laplaceBoundary", in, 3, s.path("a.pgm"), std::nullopt, out, err), 0);
  EXPECT_EQ(cli::cmdRun(kLaplace, "laplace2D", "laplaceBoundary", in, 3, s.path("b.pgm"), std::nullopt, out, err), 0);
  EXPECT_EQ(readFileBytes(s.path("a.pgm")), readFileBytes(s.path("b.pgm")));
  GridData g = readGridFile(s.path("a.pgm"));
  EXPECT_EQ(g.upper, (AbsIndex{16, 12}));
  EXPECT_NE(err.str().find("total"), std::string::npos);
}

// The CLI's text output equals the library applied directly.
TEST(Run, TextOutputMatchesLibrary) {
  Scratch s;
  std::string in = s.path("in.txt");
  writeFileBytes(in, "ypgrid 2 float64\n0 0\n3 3\n1 2 3\n4 5 6\n7 8 9\n");
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmdRun(kLaplace, "laplace2D", "laplaceBoundary", in, 1, s.path("o.txt"), std::nullopt, out, err), 0);
  EXPECT_EQ(readFileBytes(s.path("o.txt")), "ypgrid 2 float64\n0 0\n3 3\n2.0 1.0 -4.0\n-3.0 0.0 -7.0\n-16.0 -11.0 -22.0\n");
  ASSERT_EQ(cli::cmdRun(kLaplace, "laplace2D", "laplaceBoundary", in, 1, s.path("o.pgm"), GridFormat::Pgm, out, err), 0);
  EXPECT_EQ(readFileBytes(s.path("o.pgm")).substr(0, 2), "P5");
}

TEST(Run, Failures) {
  Scratch s;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmdRun(kLaplace, "laplace2D", "laplaceBoundary", s.path("missing.pgm"), 1, s.path("o.pgm"),
                        std::nullopt, out, err),
            2);
  std::string in = s.path("in.pgm");
  writeFileBytes(in, samplePgm(4, 4));
  EXPECT_EQ(cli::cmdRun(kLaplace, "laplace2D", "cornerOnly", in, 1, s.path("o.pgm"), std::nullopt, out, err), 1);
  std::string line = s.path("line.txt");
  writeFileBytes(line, "ypgrid 1 float64\n0\n2\n1 2\n");
  EXPECT_EQ(cli::cmdRun(kLaplace, "laplace2D", "laplaceBoundary", line, 1, s.path("o.txt"), std::nullopt, out, err), 2);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(exitCodeOf("check " + kLaplace + " laplace2D laplaceBoundary"), 0);
  EXPECT_EQ(exitCodeOf("check " + kLaplace + " laplace2D cornerOnly"), 1);
  EXPECT_EQ(exitCodeOf("check /nonexistent.yp laplace2D laplaceBoundary"), 2);
  EXPECT_EQ(exitCodeOf("bogus"), 2);
  EXPECT_EQ(exitCodeOf("bench laplace 8 1 --runs 1 --csv"), 0);
  EXPECT_EQ(exitCodeOf("bench-index 8 1 --runs 1"), 0);
  EXPECT_EQ(exitCodeOf("run " + kLaplace + " laplace2D laplaceBoundary /nonexistent.pgm 1 /tmp/x.pgm"), 2);
}
