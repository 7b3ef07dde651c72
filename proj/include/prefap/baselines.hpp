#pragma once

// Reference theta-join algorithms benchmarked against the pre-filter +
// amalgamated pipeline:
//   RBM  sort, split on sampled values, no filtering
//   OBT  sort, equal-count chunks, random worker placement, no filtering
//   CFS  isolated range partitions, partition-vs-whole-stream filtering
//   FTJ  isolated range partitions, re-partitioning, partition-pair filtering

#include <algorithm>
#include <chrono>
#include <limits>
#include <vector>

#include "prefap/core.hpp"
#include "prefap/joiner.hpp"
#include "prefap/partitioner.hpp"

namespace prefap {

namespace detail {

inline std::vector<Element> sorted_elements(const Stream& s) {
  std::vector<Element> v = s.elements;
  std::stable_sort(v.begin(), v.end(), [](const Element& a, const Element& b) { return a.value < b.value; });
  return v;
}

inline JoinOutput empty_output(std::size_t workers, std::chrono::steady_clock::time_point start) {
  JoinOutput out;
  out.metrics = RunMetrics::zero(workers);
  out.metrics.elapsed_ms = elapsed_since(start);
  return out;
}

inline void require_algorithm(const Config& cfg, Algorithm a) {
  if (cfg.algorithm != a) {
    throw Error(ErrorCode::InvalidConfig, std::string("config algorithm is not ") + std::string(to_string(a)));
  }
  cfg.validate();
}

}  // namespace detail

/// Sampled cut values over an ascending value sequence: 1-indexed positions
/// ceil(k*n/p) for k = 1..p-1. A sample equal to the previous cut moves on to
/// the next larger distinct value, so cuts stay strictly increasing.
inline std::vector<double> rbm_cuts(const std::vector<double>& sorted, std::size_t p) {
  std::vector<double> cuts;
  const std::size_t n = sorted.size();
  if (n == 0 || p < 2) return cuts;
  for (std::size_t k = 1; k < p; ++k) {
    const std::size_t pos = (k * n + p - 1) / p;  // 1-indexed
    std::size_t idx = pos - 1;
    if (!cuts.empty() && sorted[idx] <= cuts.back()) {
      idx = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), cuts.back()) - sorted.begin());
      if (idx == n) break;
    }
    cuts.push_back(sorted[idx]);
  }
  return cuts;
}

/// Ranges (-inf, c1), [c1, c2), ..., [c_m, +inf) over the sorted stream.
/// Empty ranges are kept so skewed inputs show up as such.
inline std::vector<Partition> rbm_partitions(const Stream& s, std::size_t p) {
  const auto sorted = detail::sorted_elements(s);
  std::vector<double> values;
  values.reserve(sorted.size());
  for (const auto& e : sorted) values.push_back(e.value);
  const auto cuts = rbm_cuts(values, p);

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Partition> parts;
  auto it = sorted.begin();
  double lo = -inf;
  for (std::size_t k = 0; k <= cuts.size(); ++k) {
    const double hi = k < cuts.size() ? cuts[k] : inf;
    auto end = k < cuts.size()
                   ? std::lower_bound(it, sorted.end(), hi, [](const Element& e, double v) { return e.value < v; })
                   : sorted.end();
    parts.emplace_back(Interval{lo, hi, false}, std::vector<Element>(it, end), s.name);
    it = end;
    lo = hi;
  }
  return parts;
}

/// p equal-count chunks of the sorted stream; the first n % p chunks hold
/// one extra element. Chunks that would be empty (n < p) are omitted.
inline std::vector<Partition> obt_chunks(const Stream& s, std::size_t p) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "partition count must be >= 1");
  const auto sorted = detail::sorted_elements(s);
  const std::size_t n = sorted.size();
  const std::size_t base = n / p;
  const std::size_t extra = n % p;
  std::vector<Partition> parts;
  std::size_t at = 0;
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    if (len == 0) continue;
    std::vector<Element> chunk(sorted.begin() + static_cast<std::ptrdiff_t>(at),
                               sorted.begin() + static_cast<std::ptrdiff_t>(at + len));
    const Interval iv{chunk.front().value, chunk.back().value, true};
    parts.emplace_back(iv, std::move(chunk), s.name);
    at += len;
  }
  return parts;
}

inline JoinOutput rbm_join(ThetaOp op, const Stream& r, const Stream& s, const Config& cfg) {
  detail::require_algorithm(cfg, Algorithm::RBM);
  const auto start = std::chrono::steady_clock::now();
  if (r.empty() || s.empty()) return detail::empty_output(cfg.workers, start);

  auto tasks = pair_tasks(share(rbm_partitions(r, cfg.partitions)), share(rbm_partitions(s, cfg.partitions)),
                          std::nullopt);
  auto out = execute(schedule(std::move(tasks), cfg.workers), op);
  out.metrics.elapsed_ms = elapsed_since(start);
  return out;
}

inline JoinOutput obt_join(ThetaOp op, const Stream& r, const Stream& s, const Config& cfg) {
  detail::require_algorithm(cfg, Algorithm::OBT);
  const auto start = std::chrono::steady_clock::now();
  if (r.empty() || s.empty()) return detail::empty_output(cfg.workers, start);

  auto tasks =
      pair_tasks(share(obt_chunks(r, cfg.partitions)), share(obt_chunks(s, cfg.partitions)), std::nullopt);
  auto out = execute(random_schedule(std::move(tasks), cfg.workers, cfg.seed), op);
  out.metrics.elapsed_ms = elapsed_since(start);
  return out;
}

/// Partitions of one stream are dropped when they cannot join with the
/// whole opposite stream; survivors are crossed in full (every surviving
/// r-partition with every surviving s-partition).
inline JoinOutput cfs_join(ThetaOp op, const Stream& r, const Stream& s, const Config& cfg) {
  detail::require_algorithm(cfg, Algorithm::CFS);
  const auto start = std::chrono::steady_clock::now();
  if (r.empty() || s.empty()) return detail::empty_output(cfg.workers, start);

  const auto rx = *stream_extremes(r);
  const auto sx = *stream_extremes(s);
  const Partition whole_r({rx.min, rx.max, true}, r.elements, r.name);
  const Partition whole_s({sx.min, sx.max, true}, s.elements, s.name);
  auto r_plan = isolated_plan(r, cfg.partitions);
  auto s_plan = isolated_plan(s, cfg.partitions);

  std::vector<Partition> r_keep;
  for (auto& part : r_plan.partitions) {
    if (partition_filter(op, part, whole_s)) r_keep.push_back(std::move(part));
  }
  std::vector<Partition> s_keep;
  for (auto& part : s_plan.partitions) {
    if (partition_filter(op, whole_r, part)) s_keep.push_back(std::move(part));
  }

  auto tasks = pair_tasks(share(std::move(r_keep)), share(std::move(s_keep)), std::nullopt);
  auto out = execute(schedule(std::move(tasks), cfg.workers), op);
  out.metrics.elapsed_ms = elapsed_since(start);
  return out;
}

/// The range pipeline without pre-filtering or amalgamation.
inline JoinOutput ftj_join(ThetaOp op, const Stream& r, const Stream& s, const Config& cfg,
                           PipelineTrace* trace = nullptr) {
  detail::require_algorithm(cfg, Algorithm::FTJ);
  PipelineOptions opts{false, false, !cfg.disable_repartition, cfg.integer_subspan_ceiling};
  return range_pipeline(op, r, s, cfg, opts, trace);
}

/// Runs the 2-way join selected by cfg.algorithm.
inline JoinOutput theta_join(ThetaOp op, const Stream& r, const Stream& s, const Config& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::RBM: return rbm_join(op, r, s, cfg);
    case Algorithm::OBT: return obt_join(op, r, s, cfg);
    case Algorithm::CFS: return cfs_join(op, r, s, cfg);
    case Algorithm::FTJ: return ftj_join(op, r, s, cfg);
    case Algorithm::PREFAP: return prefap_join(op, r, s, cfg);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown algorithm");
}

}  // namespace prefap
