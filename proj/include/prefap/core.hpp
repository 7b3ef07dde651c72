#pragma once

// Domain types shared by every stage of the theta-join pipeline.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace prefap {

enum class ErrorCode {
  EmptyStream,
  OutOfBounds,
  ArityMismatch,
  InvalidArgument,
  InvalidSpec,
  InvalidConfig,
  FileNotFound,
  ParseError,
  EmptyFile,
  DegenerateSample,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string column, const std::string& what)
      : Error(ErrorCode::ParseError, what), line_(line), column_(std::move(column)) {}

  /// 1-based line number in the source file (the header is line 1).
  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

// ---------------------------------------------------------------------------
// Theta operator

enum class ThetaOp { GT, GE, LT, LE };

constexpr bool theta_holds(ThetaOp op, double a, double b) noexcept {
  switch (op) {
    case ThetaOp::GT: return a > b;
    case ThetaOp::GE: return a >= b;
    case ThetaOp::LT: return a < b;
    case ThetaOp::LE: return a <= b;
  }
  return false;
}

constexpr std::string_view to_string(ThetaOp op) noexcept {
  switch (op) {
    case ThetaOp::GT: return "gt";
    case ThetaOp::GE: return "ge";
    case ThetaOp::LT: return "lt";
    case ThetaOp::LE: return "le";
  }
  return "?";
}

inline std::optional<ThetaOp> parse_theta(std::string_view s) {
  if (s == "gt" || s == ">") return ThetaOp::GT;
  if (s == "ge" || s == ">=") return ThetaOp::GE;
  if (s == "lt" || s == "<") return ThetaOp::LT;
  if (s == "le" || s == "<=") return ThetaOp::LE;
  return std::nullopt;
}

inline constexpr ThetaOp kAllThetaOps[] = {ThetaOp::GT, ThetaOp::GE, ThetaOp::LT,
                                           ThetaOp::LE};

// ---------------------------------------------------------------------------
// Streams

using PayloadId = std::uint64_t;

struct Element {
  double value = 0.0;
  PayloadId payload_id = 0;

  friend bool operator==(const Element&, const Element&) = default;
};

struct Stream {
  std::string name;
  std::vector<Element> elements;

  std::size_t size() const noexcept { return elements.size(); }
  bool empty() const noexcept { return elements.empty(); }

  /// Builds a stream whose payload ids are the positions of `values`.
  /// Throws InvalidArgument on a non-finite value.
  static Stream from_values(std::string name, const std::vector<double>& values) {
    Stream s{std::move(name), {}};
    s.elements.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        throw Error(ErrorCode::InvalidArgument,
                    "non-finite value at position " + std::to_string(i));
      }
      s.elements.push_back({values[i], static_cast<PayloadId>(i)});
    }
    return s;
  }

  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(elements.size());
    for (const auto& e : elements) out.push_back(e.value);
    return out;
  }
};

struct Extremes {
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const Extremes&, const Extremes&) = default;
};

/// Single pass; nullopt for an empty range.
template <class Range>
std::optional<Extremes> extremes_of(const Range& elements) {
  auto it = std::begin(elements);
  auto end = std::end(elements);
  if (it == end) return std::nullopt;
  Extremes ex{it->value, it->value};
  for (++it; it != end; ++it) {
    ex.min = std::min(ex.min, it->value);
    ex.max = std::max(ex.max, it->value);
  }
  return ex;
}

inline std::optional<Extremes> stream_extremes(const Stream& s) {
  return extremes_of(s.elements);
}

// ---------------------------------------------------------------------------
// Boundaries and partitions

/// A range of the join attribute. Half-open [lo, hi) unless closed_hi, in
/// which case [lo, hi]. lo == hi is only legal when closed_hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool closed_hi = false;

  bool contains(double v) const noexcept {
    return v >= lo && (closed_hi ? v <= hi : v < hi);
  }

  bool valid() const noexcept { return lo < hi || (lo == hi && closed_hi); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Strictly increasing cut points. A single cut denotes the degenerate
/// boundary of an all-equal stream, i.e. the one closed interval [c, c].
class Boundary {
 public:
  Boundary() = default;

  /// Sorts and removes exact duplicates. Throws InvalidArgument when no cut
  /// is given or a cut is not finite.
  explicit Boundary(std::vector<double> cuts) : cuts_(std::move(cuts)) {
    if (cuts_.empty()) throw Error(ErrorCode::InvalidArgument, "boundary needs at least one cut");
    for (double c : cuts_) {
      if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "non-finite boundary cut");
    }
    std::sort(cuts_.begin(), cuts_.end());
    cuts_.erase(std::unique(cuts_.begin(), cuts_.end()), cuts_.end());
  }

  const std::vector<double>& cuts() const noexcept { return cuts_; }
  bool empty() const noexcept { return cuts_.empty(); }
  bool degenerate() const noexcept { return cuts_.size() == 1; }
  double first() const { return cuts_.front(); }
  double last() const { return cuts_.back(); }

  std::size_t interval_count() const noexcept {
    if (cuts_.empty()) return 0;
    return cuts_.size() == 1 ? 1 : cuts_.size() - 1;
  }

  Interval interval(std::size_t i) const {
    if (degenerate()) return {cuts_[0], cuts_[0], true};
    const bool last_one = i + 2 == cuts_.size();
    return {cuts_[i], cuts_[i + 1], last_one};
  }

  std::vector<Interval> intervals() const {
    std::vector<Interval> out;
    out.reserve(interval_count());
    for (std::size_t i = 0; i < interval_count(); ++i) out.push_back(interval(i));
    return out;
  }

  /// Index of the interval holding v under the half-open rule, or nullopt
  /// when v lies outside [first, last].
  std::optional<std::size_t> locate(double v) const noexcept {
    if (cuts_.empty() || v < cuts_.front() || v > cuts_.back()) return std::nullopt;
    if (degenerate()) return 0;
    auto it = std::upper_bound(cuts_.begin(), cuts_.end(), v);
    auto idx = static_cast<std::size_t>(it - cuts_.begin());
    // v == last cut lands in the closed final interval
    return std::min(idx, cuts_.size() - 1) - 1;
  }

  friend bool operator==(const Boundary&, const Boundary&) = default;

 private:
  std::vector<double> cuts_;
};

class Partition {
 public:
  Partition() = default;
  Partition(Interval interval, std::vector<Element> elements, std::string stream_name = {})
      : interval_(interval), elements_(std::move(elements)), stream_name_(std::move(stream_name)) {
    if (auto ex = extremes_of(elements_)) extremes_ = *ex;
  }

  const Interval& interval() const noexcept { return interval_; }
  const std::vector<Element>& elements() const noexcept { return elements_; }
  const std::string& stream_name() const noexcept { return stream_name_; }
  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }

  /// Cached element extremes; meaningless when empty().
  double min() const noexcept { return extremes_.min; }
  double max() const noexcept { return extremes_.max; }

 private:
  Interval interval_;
  std::vector<Element> elements_;
  std::string stream_name_;
  Extremes extremes_;
};

// ---------------------------------------------------------------------------
// Join output and metrics

/// One 2-way output tuple.
struct JoinPair {
  Element left;
  Element right;

  friend bool operator==(const JoinPair&, const JoinPair&) = default;
};

/// One n-way output tuple, one element per joined stream.
using JoinTuple = std::vector<Element>;

struct RunMetrics {
  std::uint64_t cartesian_count = 0;
  std::uint64_t result_count = 0;
  double elapsed_ms = 0.0;
  std::vector<std::uint64_t> per_worker_in;
  std::vector<std::uint64_t> per_worker_out;
  double lb_in = 1.0;
  double lb_out = 1.0;

  static RunMetrics zero(std::size_t workers) {
    RunMetrics m;
    m.per_worker_in.assign(workers, 0);
    m.per_worker_out.assign(workers, 0);
    return m;
  }

  /// Recomputes lb_in / lb_out from the per-worker vectors.
  void finalize_balance() {
    lb_in = balance_ratio(per_worker_in);
    lb_out = balance_ratio(per_worker_out);
  }

  /// Adds another run's counts (worker vectors element-wise).
  void accumulate(const RunMetrics& other) {
    cartesian_count += other.cartesian_count;
    result_count += other.result_count;
    elapsed_ms += other.elapsed_ms;
    auto add = [](std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& from) {
      if (into.size() < from.size()) into.resize(from.size(), 0);
      for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
    };
    add(per_worker_in, other.per_worker_in);
    add(per_worker_out, other.per_worker_out);
    finalize_balance();
  }

  /// max / mean over workers; 1.0 when there is no load at all.
  static double balance_ratio(const std::vector<std::uint64_t>& loads) {
    if (loads.empty()) return 1.0;
    std::uint64_t total = 0;
    std::uint64_t peak = 0;
    for (auto l : loads) {
      total += l;
      peak = std::max(peak, l);
    }
    if (total == 0) return 1.0;
    const double mean = static_cast<double>(total) / static_cast<double>(loads.size());
    return static_cast<double>(peak) / mean;
  }
};

// ---------------------------------------------------------------------------
// Run configuration

enum class Algorithm { RBM, OBT, CFS, FTJ, PREFAP };

constexpr std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::RBM: return "rbm";
    case Algorithm::OBT: return "obt";
    case Algorithm::CFS: return "cfs";
    case Algorithm::FTJ: return "ftj";
    case Algorithm::PREFAP: return "prefap";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  if (s == "rbm") return Algorithm::RBM;
  if (s == "obt") return Algorithm::OBT;
  if (s == "cfs") return Algorithm::CFS;
  if (s == "ftj") return Algorithm::FTJ;
  if (s == "prefap") return Algorithm::PREFAP;
  return std::nullopt;
}

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::RBM, Algorithm::OBT, Algorithm::CFS,
                                               Algorithm::FTJ, Algorithm::PREFAP};

struct Config {
  std::vector<ThetaOp> thetas{ThetaOp::LE};
  std::size_t partitions = 10;
  std::size_t window = 1000;
  std::size_t workers = 4;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::PREFAP;

  bool disable_prefilter = false;
  bool disable_amalgamation = false;
  /// Skips oversized-partition re-partitioning (PREFAP and FTJ only).
  bool disable_repartition = false;
  /// Rounds the re-partitioning sub-span up to an integer. Only sensible
  /// for integer-valued attributes.
  bool integer_subspan_ceiling = false;

  /// Throws InvalidConfig when a field is out of range.
  void validate() const {
    if (partitions < 1) throw Error(ErrorCode::InvalidConfig, "partitions must be >= 1");
    if (window < 1) throw Error(ErrorCode::InvalidConfig, "window must be >= 1");
    if (workers < 1) throw Error(ErrorCode::InvalidConfig, "workers must be >= 1");
    if (thetas.empty()) throw Error(ErrorCode::InvalidConfig, "at least one theta operator is required");
    if ((disable_prefilter || disable_amalgamation) && algorithm != Algorithm::PREFAP) {
      throw Error(ErrorCode::InvalidConfig, "ablation flags are only valid with prefap");
    }
    if (disable_repartition && algorithm != Algorithm::PREFAP && algorithm != Algorithm::FTJ) {
      throw Error(ErrorCode::InvalidConfig, "repartition ablation is only valid with prefap or ftj");
    }
  }
};

}  // namespace prefap
