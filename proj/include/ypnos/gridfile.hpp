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

// Grid files.
//
// Text form:
//   ypgrid <rank> <float64|int64>
//   <lower coords>
//   <upper coords>          (exclusive)
//   <values, first dimension fastest>
//
// PGM (P2 or P5, maxval up to 65535) reads as a rank-2 Float64 grid over
// (0,0)..(width,height); pixel values map to themselves. Writing clamps to
// [0, maxval] and rounds half to even.

#ifndef YPNOS_GRIDFILE_HPP
#define YPNOS_GRIDFILE_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ypnos/core.hpp"
#include "ypnos/expr.hpp"

namespace ypnos {

enum class GridFormat { Text, Pgm };

struct PgmInfo {
  bool binary = true;  // P5 when true, P2 otherwise
  int maxval = 255;
};

struct GridData {
  GridFormat format = GridFormat::Text;
  PgmInfo pgm;
  AbsIndex lower{0};
  AbsIndex upper{1};
  std::variant<std::vector<double>, std::vector<std::int64_t>> values;

  std::size_t rank() const { return lower.rank(); }
  ElemType elemType() const {
    return std::holds_alternative<std::vector<double>>(values) ? ElemType::Float64 : ElemType::Int64;
  }
};

namespace detail {

inline std::size_t cellCount(const AbsIndex& lower, const AbsIndex& upper) {
  std::size_t n = 1;
  for (std::size_t d = 0; d < lower.rank(); ++d) {
    if (upper[d] <= lower[d]) throw Error(ErrorKind::DegenerateExtent, "grid file extent is empty");
    n *= static_cast<std::size_t>(upper[d] - lower[d]);
  }
  return n;
}

inline bool parseInt(const std::string& tok, std::int64_t& out) {
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return r.ec == std::errc{} && r.ptr == tok.data() + tok.size();
}

inline bool parseDouble(const std::string& tok, double& out) {
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return r.ec == std::errc{} && r.ptr == tok.data() + tok.size();
}

inline GridData parseTextGrid(const std::string& content) {
  std::istringstream in(content);
  std::string magic, type;
  std::int64_t rank = 0;
  if (!(in >> magic >> rank >> type) || magic != "ypgrid")
    throw Error(ErrorKind::IoError, "not a ypgrid file");
  if (rank < 1 || rank > static_cast<std::int64_t>(kMaxRank))
    throw Error(ErrorKind::IoError, "ypgrid rank must be 1..3");
  if (type != "float64" && type != "int64")
    throw Error(ErrorKind::IoError, "ypgrid element type must be float64 or int64");
  auto readIndex = [&](const char* what) {
    AbsIndex a(static_cast<std::size_t>(rank));
    for (std::int64_t d = 0; d < rank; ++d) {
      std::string tok;
      if (!(in >> tok) || !parseInt(tok, a[static_cast<std::size_t>(d)]))
        throw Error(ErrorKind::IoError, std::string("bad ") + what + " bound in ypgrid header");
    }
    return a;
  };
  GridData g;
  g.format = GridFormat::Text;
  g.lower = readIndex("lower");
  g.upper = readIndex("upper");
  std::size_t n = cellCount(g.lower, g.upper);
  std::vector<std::string> toks;
  for (std::string tok; in >> tok;) toks.push_back(tok);
  if (toks.size() != n)
    throw Error(ErrorKind::SizeMismatch, "ypgrid expects " + std::to_string(n) + " values, found " +
                                             std::to_string(toks.size()));
  if (type == "float64") {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!parseDouble(toks[i], v[i])) throw Error(ErrorKind::IoError, "bad float64 value '" + toks[i] + "'");
    g.values = std::move(v);
  } else {
    std::vector<std::int64_t> v(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!parseInt(toks[i], v[i])) throw Error(ErrorKind::IoError, "bad int64 value '" + toks[i] + "'");
    g.values = std::move(v);
  }
  return g;
}

inline GridData parsePgm(const std::string& c) {
  std::size_t pos = 2;
  auto skipSpace = [&] {
    while (pos < c.size()) {
      if (c[pos] == '#') {
        while (pos < c.size() && c[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&](const char* what) {
    skipSpace();
    std::int64_t v = 0;
    auto r = std::from_chars(c.data() + pos, c.data() + c.size(), v);
    if (r.ec != std::errc{}) throw Error(ErrorKind::IoError, std::string("bad PGM ") + what);
    pos = static_cast<std::size_t>(r.ptr - c.data());
    return v;
  };
  GridData g;
  g.format = GridFormat::Pgm;
  g.pgm.binary = c[1] == '5';
  std::int64_t w = number("width"), h = number("height"), maxval = number("maxval");
  if (w < 1 || h < 1) throw Error(ErrorKind::DegenerateExtent, "PGM has an empty raster");
  if (maxval < 1 || maxval > 65535) throw Error(ErrorKind::IoError, "PGM maxval must be 1..65535");
  g.pgm.maxval = static_cast<int>(maxval);
  g.lower = AbsIndex{0, 0};
  g.upper = AbsIndex{w, h};
  auto n = static_cast<std::size_t>(w * h);
  std::vector<double> v(n);
  if (g.pgm.binary) {
    if (pos >= c.size() || !std::isspace(static_cast<unsigned char>(c[pos])))
      throw Error(ErrorKind::IoError, "PGM header must end with one whitespace byte");
    ++pos;
    std::size_t bytes = maxval < 256 ? 1 : 2;
    if (c.size() - pos < n * bytes) throw Error(ErrorKind::SizeMismatch, "PGM raster is truncated");
    for (std::size_t i = 0; i < n; ++i) {
      auto hi = static_cast<unsigned char>(c[pos + i * bytes]);
      unsigned value = bytes == 1 ? hi : (hi << 8u) | static_cast<unsigned char>(c[pos + i * bytes + 1]);
      if (value > static_cast<unsigned>(maxval)) throw Error(ErrorKind::IoError, "PGM sample exceeds maxval");
      v[i] = value;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t s = number("sample");
      if (s < 0 || s > maxval) throw Error(ErrorKind::IoError, "PGM sample exceeds maxval");
      v[i] = static_cast<double>(s);
    }
    skipSpace();
    if (pos != c.size()) throw Error(ErrorKind::SizeMismatch, "PGM has trailing samples");
  }
  g.values = std::move(v);
  return g;
}

inline unsigned pgmSample(double v, int maxval) {
  if (std::isnan(v)) return 0;
  double clamped = std::min<double>(std::max(v, 0.0), maxval);
  return static_cast<unsigned>(std::nearbyint(clamped));  // default mode rounds half to even
}

}  // namespace detail

inline GridData parseGridData(const std::string& content) {
  if (content.size() >= 2 && content[0] == 'P' && (content[1] == '2' || content[1] == '5'))
    return detail::parsePgm(content);
  return detail::parseTextGrid(content);
}

inline std::string readFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void writeFileBytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << bytes;
  if (!out) throw Error(ErrorKind::IoError, "error writing '" + path + "'");
}

inline GridData readGridFile(const std::string& path) { return parseGridData(readFileBytes(path)); }

inline std::string formatGridText(const GridData& g) {
  std::string out = "ypgrid " + std::to_string(g.rank()) + " " +
                    (g.elemType() == ElemType::Float64 ? "float64" : "int64") + "\n";
  for (std::size_t d = 0; d < g.rank(); ++d) out += (d ? " " : "") + std::to_string(g.lower[d]);
  out += "\n";
  for (std::size_t d = 0; d < g.rank(); ++d) out += (d ? " " : "") + std::to_string(g.upper[d]);
  out += "\n";
  auto width = static_cast<std::size_t>(g.upper[0] - g.lower[0]);
  std::visit(
      [&](const auto& vs) {
        for (std::size_t i = 0; i < vs.size(); ++i) {
          if constexpr (std::is_same_v<std::decay_t<decltype(vs[i])>, double>)
            out += formatFloat(vs[i]);
          else
            out += std::to_string(vs[i]);
          out += (i + 1) % width == 0 ? "\n" : " ";
        }
      },
      g.values);
  return out;
}

inline std::string formatGridPgm(const GridData& g) {
  if (g.rank() != 2) throw Error(ErrorKind::RankMismatch, "PGM output needs a rank-2 grid");
  std::int64_t w = g.upper[0] - g.lower[0], h = g.upper[1] - g.lower[1];
  int maxval = g.pgm.maxval;
  std::string out = std::string(g.pgm.binary ? "P5" : "P2") + "\n" + std::to_string(w) + " " +
                    std::to_string(h) + "\n" + std::to_string(maxval) + "\n";
  std::vector<double> vs;
  std::visit([&](const auto& src) { vs.assign(src.begin(), src.end()); }, g.values);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    unsigned s = detail::pgmSample(vs[i], maxval);
    if (g.pgm.binary) {
      if (maxval >= 256) out += static_cast<char>((s >> 8u) & 0xffu);
      out += static_cast<char>(s & 0xffu);
    } else {
      out += std::to_string(s);
      out += (i + 1) % static_cast<std::size_t>(w) == 0 ? "\n" : " ";
    }
  }
  return out;
}

inline void writeGridFile(const std::string& path, const GridData& g) {
  writeFileBytes(path, g.format == GridFormat::Pgm ? formatGridPgm(g) : formatGridText(g));
}

}  // namespace ypnos

#endif  // YPNOS_GRIDFILE_HPP
