#pragma once

// Synthetic stream generation, CSV ingestion and tumbling windows.
//
// Generation uses std::mt19937_64 (the engine's output sequence is fixed by
// the C++ standard) with hand-written transforms: the standard distribution
// classes are implementation-defined, so they would not give portable streams.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prefap/core.hpp"

namespace prefap {

struct UniformDist {
  double lo = 0.0;
  double hi = 1.0;
};

struct NormalDist {
  double mu = 0.0;
  double sigma = 1.0;
};

struct ZipfDist {
  double alpha = 1.2;
  std::size_t n_distinct = 1000;
};

using DistKind = std::variant<UniformDist, NormalDist, ZipfDist>;

struct DistSpec {
  DistKind kind = UniformDist{};
  std::uint64_t seed = 0;
  std::size_t count = 0;
};

inline void validate(const DistSpec& spec) {
  if (spec.count < 1) throw Error(ErrorCode::InvalidSpec, "count must be >= 1");
  if (const auto* u = std::get_if<UniformDist>(&spec.kind)) {
    if (!(std::isfinite(u->lo) && std::isfinite(u->hi) && u->lo < u->hi)) {
      throw Error(ErrorCode::InvalidSpec, "uniform needs finite lo < hi");
    }
  } else if (const auto* n = std::get_if<NormalDist>(&spec.kind)) {
    if (!(std::isfinite(n->mu) && std::isfinite(n->sigma) && n->sigma > 0)) {
      throw Error(ErrorCode::InvalidSpec, "normal needs finite mu and sigma > 0");
    }
  } else if (const auto* z = std::get_if<ZipfDist>(&spec.kind)) {
    if (!(z->alpha > 1.0 && std::isfinite(z->alpha))) throw Error(ErrorCode::InvalidSpec, "zipf needs alpha > 1");
    if (z->n_distinct < 1) throw Error(ErrorCode::InvalidSpec, "zipf needs n_distinct >= 1");
  }
}

namespace detail {

/// 53-bit uniform in [0, 1).
inline double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Deterministic in `spec`. Uniform draws lie in [lo, hi); Normal uses
/// Box-Muller with both outputs consumed; Zipf emits the rank k in
/// [1, n_distinct] with probability proportional to k^-alpha.
inline Stream generate(const DistSpec& spec, std::string name = "stream") {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::vector<double> values;
  values.reserve(spec.count);

  if (const auto* u = std::get_if<UniformDist>(&spec.kind)) {
    for (std::size_t i = 0; i < spec.count; ++i) {
      double v = u->lo + (u->hi - u->lo) * detail::unit_double(rng);
      values.push_back(std::min(v, std::nextafter(u->hi, u->lo)));
    }
  } else if (const auto* n = std::get_if<NormalDist>(&spec.kind)) {
    while (values.size() < spec.count) {
      const double u1 = 1.0 - detail::unit_double(rng);  // (0, 1]
      const double u2 = detail::unit_double(rng);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      values.push_back(n->mu + n->sigma * radius * std::cos(angle));
      if (values.size() < spec.count) values.push_back(n->mu + n->sigma * radius * std::sin(angle));
    }
  } else {
    const auto& z = std::get<ZipfDist>(spec.kind);
    std::vector<double> cdf(z.n_distinct);
    double acc = 0.0;
    for (std::size_t k = 1; k <= z.n_distinct; ++k) {
      acc += std::pow(static_cast<double>(k), -z.alpha);
      cdf[k - 1] = acc;
    }
    for (std::size_t i = 0; i < spec.count; ++i) {
      const double target = detail::unit_double(rng) * acc;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
      const auto rank = std::min(static_cast<std::size_t>(it - cdf.begin()), z.n_distinct - 1) + 1;
      values.push_back(static_cast<double>(rank));
    }
  }
  return Stream::from_values(std::move(name), values);
}

/// Parses "uniform:lo:hi", "normal:mu:sigma" or "zipf:alpha[:n_distinct]".
inline DistKind parse_dist(std::string_view text) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in{std::string(text)};
  while (std::getline(in, token, ':')) parts.push_back(token);
  auto num = [&](std::size_t i) {
    double v = 0.0;
    const auto& s = parts.at(i);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(ErrorCode::InvalidSpec, "bad number '" + s + "' in distribution '" + std::string(text) + "'");
    }
    return v;
  };
  if (parts.empty()) throw Error(ErrorCode::InvalidSpec, "empty distribution spec");
  const auto& kind = parts[0];
  if (kind == "uniform" && parts.size() == 3) return UniformDist{num(1), num(2)};
  if (kind == "normal" && parts.size() == 3) return NormalDist{num(1), num(2)};
  if (kind == "zipf" && (parts.size() == 2 || parts.size() == 3)) {
    ZipfDist z{num(1), 1000};
    if (parts.size() == 3) {
      const double n = num(2);
      if (!(n >= 1) || n != std::floor(n)) throw Error(ErrorCode::InvalidSpec, "zipf n_distinct must be a positive integer");
      z.n_distinct = static_cast<std::size_t>(n);
    }
    return z;
  }
  throw Error(ErrorCode::InvalidSpec, "unrecognised distribution '" + std::string(text) + "'");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t at = 0;
  while (true) {
    const auto comma = line.find(',', at);
    out.push_back(trim(line.substr(at, comma == std::string_view::npos ? std::string_view::npos : comma - at)));
    if (comma == std::string_view::npos) break;
    at = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Reads one numeric column of a headed, comma-separated file. Payload ids
/// are 0-based data row indices. Blank lines are skipped.
inline Stream load_csv(const std::filesystem::path& path, const std::string& column = "value") {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path.string() + "'");

  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> col_index;
  std::size_t header_width = 0;
  Stream s{path.stem().string(), {}};

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (detail::trim(view).empty()) continue;
    const auto fields = detail::split_commas(view);

    if (!col_index) {
      header_width = fields.size();
      auto it = std::find(fields.begin(), fields.end(), column);
      if (it == fields.end()) {
        throw ParseError(line_no, column, path.string() + ":" + std::to_string(line_no) + ": no column named '" +
                                              column + "' in header");
      }
      col_index = static_cast<std::size_t>(it - fields.begin());
      continue;
    }

    auto fail = [&](const std::string& why) {
      return ParseError(line_no, column, path.string() + ":" + std::to_string(line_no) + ": column '" + column +
                                             "': " + why);
    };
    if (fields.size() != header_width) throw fail("expected " + std::to_string(header_width) + " fields");
    const auto cell = fields[*col_index];
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw fail("cannot parse '" + std::string(cell) + "' as a number");
    }
    if (!std::isfinite(v)) throw fail("non-finite value '" + std::string(cell) + "'");
    s.elements.push_back({v, static_cast<PayloadId>(s.elements.size())});
  }

  if (!col_index || s.empty()) throw Error(ErrorCode::EmptyFile, "'" + path.string() + "' has no data rows");
  return s;
}

/// Tumbling windows of w elements in arrival order; the last may be short.
inline std::vector<Stream> windows(const Stream& s, std::size_t w) {
  if (w < 1) throw Error(ErrorCode::InvalidArgument, "window size must be >= 1");
  std::vector<Stream> out;
  for (std::size_t at = 0; at < s.size(); at += w) {
    const auto end = std::min(at + w, s.size());
    out.push_back(Stream{s.name, std::vector<Element>(s.elements.begin() + static_cast<std::ptrdiff_t>(at),
                                                      s.elements.begin() + static_cast<std::ptrdiff_t>(end))});
  }
  return out;
}

}  // namespace prefap
