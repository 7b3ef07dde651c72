#pragma once

// Range partitioning: equal-span boundaries, boundary amalgamation, element
// assignment and oversized-partition re-partitioning.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "prefap/core.hpp"

namespace prefap {

struct PartitionPlan {
  Boundary boundary;
  /// Non-empty partitions ordered by interval lo.
  std::vector<Partition> partitions;

  std::size_t element_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : partitions) n += p.size();
    return n;
  }
};

/// (max - min) / p, or nullopt when the range is degenerate (min == max).
inline std::optional<double> span(double min, double max, std::size_t p) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "partition count must be >= 1");
  if (!(min <= max)) throw Error(ErrorCode::InvalidArgument, "span requires min <= max");
  if (min == max) return std::nullopt;
  return (max - min) / static_cast<double>(p);
}

/// Cuts min + k*sp for k < p, then exactly max. An all-equal stream yields the
/// degenerate single-cut boundary.
inline Boundary boundary_of(const Stream& s, std::size_t p) {
  const auto ex = stream_extremes(s);
  if (!ex) throw Error(ErrorCode::EmptyStream, "cannot partition empty stream '" + s.name + "'");
  const auto sp = span(ex->min, ex->max, p);
  if (!sp) return Boundary({ex->min});

  std::vector<double> cuts;
  cuts.reserve(p + 1);
  for (std::size_t k = 0; k < p; ++k) {
    const double c = ex->min + static_cast<double>(k) * *sp;
    if (c < ex->max) cuts.push_back(c);
  }
  cuts.push_back(ex->max);
  return Boundary(std::move(cuts));
}

inline Boundary amalgamate(const Boundary& a, const Boundary& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "cannot amalgamate an empty boundary");
  std::vector<double> cuts = a.cuts();
  cuts.insert(cuts.end(), b.cuts().begin(), b.cuts().end());
  return Boundary(std::move(cuts));
}

/// Places every element by binary search over the cuts. Empty partitions are
/// dropped; arrival order is kept inside each partition.
inline PartitionPlan assign(const Stream& s, const Boundary& b) {
  PartitionPlan plan{b, {}};
  if (s.empty()) return plan;

  std::vector<std::vector<Element>> buckets(b.interval_count());
  for (const auto& e : s.elements) {
    const auto idx = b.locate(e.value);
    if (!idx) {
      throw Error(ErrorCode::OutOfBounds, "value " + std::to_string(e.value) + " of stream '" + s.name +
                                              "' lies outside the boundary");
    }
    buckets[*idx].push_back(e);
  }
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    if (!buckets[i].empty()) plan.partitions.emplace_back(b.interval(i), std::move(buckets[i]), s.name);
  }
  return plan;
}

inline PartitionPlan isolated_plan(const Stream& s, std::size_t p) { return assign(s, boundary_of(s, p)); }

struct RepartitionOptions {
  /// Round the sub-span up to an integer before cutting.
  bool integer_subspan_ceiling = false;
};

namespace detail {

// Splits one partition into sub-intervals of its own interval. The inner cuts
// are min + k*sub_span; outer bounds and closedness are inherited.
inline void split_partition(const Partition& part, std::size_t pieces, const RepartitionOptions& opts,
                            std::vector<Partition>& out, std::vector<double>& new_cuts) {
  const Interval outer = part.interval();
  double sub = (part.max() - part.min()) / static_cast<double>(pieces);
  if (opts.integer_subspan_ceiling) sub = std::ceil(sub);

  std::vector<double> cuts{outer.lo};
  for (std::size_t k = 1; k < pieces; ++k) {
    const double c = part.min() + static_cast<double>(k) * sub;
    if (c > part.max()) break;
    if (c > cuts.back() && c < outer.hi) cuts.push_back(c);
  }
  cuts.push_back(outer.hi);

  const std::size_t n = cuts.size() - 1;
  std::vector<std::vector<Element>> buckets(n);
  for (const auto& e : part.elements()) {
    auto it = std::upper_bound(cuts.begin() + 1, cuts.end() - 1, e.value);
    buckets[static_cast<std::size_t>(it - (cuts.begin() + 1))].push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (buckets[i].empty()) continue;
    const bool last = i + 1 == n;
    out.emplace_back(Interval{cuts[i], cuts[i + 1], last ? outer.closed_hi : false}, std::move(buckets[i]),
                     part.stream_name());
  }
  new_cuts.insert(new_cuts.end(), cuts.begin() + 1, cuts.end() - 1);
}

}  // namespace detail

/// Splits every partition larger than the average size w / partition-count
/// into ceil(size / average) equal-width pieces. One pass, not recursive.
/// A partition whose elements all share one value is left whole.
inline PartitionPlan repartition_oversized(const PartitionPlan& plan, std::size_t w,
                                           RepartitionOptions opts = {}) {
  if (plan.partitions.empty()) return plan;
  if (w < 1) throw Error(ErrorCode::InvalidArgument, "window must be >= 1");

  const double average = static_cast<double>(w) / static_cast<double>(plan.partitions.size());
  PartitionPlan out;
  std::vector<double> new_cuts;
  for (const auto& part : plan.partitions) {
    const auto size = static_cast<double>(part.size());
    if (size <= average || part.min() == part.max()) {
      out.partitions.push_back(part);
      continue;
    }
    const auto pieces = static_cast<std::size_t>(std::ceil(size / average));
    detail::split_partition(part, pieces, opts, out.partitions, new_cuts);
  }
  if (new_cuts.empty()) {
    out.boundary = plan.boundary;
  } else {
    new_cuts.insert(new_cuts.end(), plan.boundary.cuts().begin(), plan.boundary.cuts().end());
    out.boundary = Boundary(std::move(new_cuts));
  }
  return out;
}

}  // namespace prefap
