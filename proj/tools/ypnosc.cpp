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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ypnos/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ypnosc: check and run boundary-safe stencil programs"};
  app.require_subcommand(1);

  std::string program, stencil, boundary, input, output, format, kernel;
  std::int64_t iterations = 1, size = 512;
  int benchIters = 100, runs = 10;
  bool csv = false;

  auto* check = app.add_subcommand("check", "statically check a stencil against a boundary");
  check->add_option("program", program, "program file")->required();
  check->add_option("stencil", stencil, "stencil name")->required();
  check->add_option("boundary", boundary, "boundary name")->required();

  auto* run = app.add_subcommand("run", "apply a stencil repeatedly to a grid file");
  run->add_option("program", program, "program file")->required();
  run->add_option("stencil", stencil, "stencil name")->required();
  run->add_option("boundary", boundary, "boundary name")->required();
  run->add_option("input", input, "input grid (ypgrid text or PGM)")->required();
  run->add_option("iterations", iterations, "number of applications")->required()->check(CLI::NonNegativeNumber);
  run->add_option("output", output, "output grid path")->required();
  run->add_option("--format", format, "output format (default: same as input)")
      ->check(CLI::IsMember({"text", "pgm"}));

  auto* benchCmd = app.add_subcommand("bench", "time the DSL against reference loops");
  benchCmd->add_option("kernel", kernel, "laplace or log")->required()->check(CLI::IsMember({"laplace", "log"}));
  benchCmd->add_option("size", size, "grid side N")->required()->check(CLI::PositiveNumber);
  benchCmd->add_option("iterations", benchIters, "K")->required()->check(CLI::PositiveNumber);
  benchCmd->add_option("--runs", runs, "repetitions per timing")->check(CLI::PositiveNumber);
  benchCmd->add_flag("--csv", csv, "also emit CSV");

  auto* benchIndex = app.add_subcommand("bench-index", "compare indexing strategies on Laplace");
  benchIndex->add_option("size", size, "grid side N")->required()->check(CLI::PositiveNumber);
  benchIndex->add_option("iterations", benchIters, "K")->required()->check(CLI::PositiveNumber);
  benchIndex->add_option("--runs", runs, "repetitions per timing")->check(CLI::PositiveNumber);
  benchIndex->add_flag("--csv", csv, "also emit CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : ypnos::cli::kExitError;
  }

  using namespace ypnos::cli;
  if (*check) return cmdCheck(program, stencil, boundary, std::cout, std::cerr);
  if (*run) {
    std::optional<ypnos::GridFormat> fmt;
    if (format == "text") fmt = ypnos::GridFormat::Text;
    if (format == "pgm") fmt = ypnos::GridFormat::Pgm;
    return cmdRun(program, stencil, boundary, input, iterations, output, fmt, std::cout, std::cerr);
  }
  if (*benchCmd) return cmdBench(kernel, size, benchIters, csv, runs, std::cout, std::cerr);
  return cmdBenchIndex(size, benchIters, csv, runs, std::cout, std::cerr);
}
