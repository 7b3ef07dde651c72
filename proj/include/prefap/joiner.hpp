#pragma once

// Partition-level filtering, task scheduling, parallel Cartesian evaluation
// and the end-to-end pre-filter + amalgamated partitioning pipeline.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "prefap/core.hpp"
#include "prefap/partitioner.hpp"
#include "prefap/prefilter.hpp"

namespace prefap {

/// Keep decision for a partition pair, from cached element extremes only.
inline bool partition_filter(ThetaOp op, const Partition& pr, const Partition& ps) noexcept {
  switch (op) {
    case ThetaOp::GT: return pr.max() > ps.min();
    case ThetaOp::GE: return pr.max() >= ps.min();
    case ThetaOp::LT: return pr.min() < ps.max();
    case ThetaOp::LE: return pr.min() <= ps.max();
  }
  return true;
}

struct JoinTask {
  std::shared_ptr<const Partition> left;
  std::shared_ptr<const Partition> right;
  std::size_t left_index = 0;
  std::size_t right_index = 0;
  std::size_t worker = 0;

  std::uint64_t pair_count() const noexcept {
    return static_cast<std::uint64_t>(left->size()) * right->size();
  }
};

struct Schedule {
  std::vector<JoinTask> tasks;
  std::size_t workers = 1;

  std::uint64_t total_pairs() const noexcept {
    std::uint64_t n = 0;
    for (const auto& t : tasks) n += t.pair_count();
    return n;
  }
};

using SharedPartitions = std::vector<std::shared_ptr<const Partition>>;

inline SharedPartitions share(std::vector<Partition> parts) {
  SharedPartitions out;
  out.reserve(parts.size());
  for (auto& p : parts) out.push_back(std::make_shared<const Partition>(std::move(p)));
  return out;
}

/// Row-major candidate pairs (left index outer). With `op` set, pairs failing
/// partition_filter are dropped; pairs with an empty side are always dropped.
inline std::vector<JoinTask> pair_tasks(const SharedPartitions& left, const SharedPartitions& right,
                                        std::optional<ThetaOp> op) {
  std::vector<JoinTask> tasks;
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (left[i]->empty()) continue;
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (right[j]->empty()) continue;
      if (op && !partition_filter(*op, *left[i], *right[j])) continue;
      tasks.push_back({left[i], right[j], i, j, 0});
    }
  }
  return tasks;
}

/// Longest-processing-time greedy placement: heaviest task first onto the
/// least-loaded worker. Ties break on (left, right) index and lowest worker.
inline Schedule schedule(std::vector<JoinTask> kept, std::size_t workers) {
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
  std::vector<std::size_t> order(kept.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto pa = kept[a].pair_count();
    const auto pb = kept[b].pair_count();
    if (pa != pb) return pa > pb;
    if (kept[a].left_index != kept[b].left_index) return kept[a].left_index < kept[b].left_index;
    return kept[a].right_index < kept[b].right_index;
  });

  std::vector<std::uint64_t> load(workers, 0);
  for (std::size_t idx : order) {
    const auto w = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    kept[idx].worker = w;
    load[w] += kept[idx].pair_count();
  }
  return {std::move(kept), workers};
}

/// Uniform-random placement driven by `seed`.
inline Schedule random_schedule(std::vector<JoinTask> tasks, std::size_t workers, std::uint64_t seed) {
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
  std::mt19937_64 rng(seed);
  for (auto& t : tasks) t.worker = static_cast<std::size_t>(rng() % workers);
  return {std::move(tasks), workers};
}

struct JoinOutput {
  std::vector<JoinPair> results;
  RunMetrics metrics;
};

namespace detail {

template <ThetaOp Op>
void cross_into(const Partition& left, const Partition& right, std::vector<JoinPair>& out) {
  for (const auto& x : left.elements()) {
    for (const auto& y : right.elements()) {
      if (theta_holds(Op, x.value, y.value)) out.push_back({x, y});
    }
  }
}

inline void cross_into(ThetaOp op, const Partition& left, const Partition& right, std::vector<JoinPair>& out) {
  switch (op) {
    case ThetaOp::GT: cross_into<ThetaOp::GT>(left, right, out); break;
    case ThetaOp::GE: cross_into<ThetaOp::GE>(left, right, out); break;
    case ThetaOp::LT: cross_into<ThetaOp::LT>(left, right, out); break;
    case ThetaOp::LE: cross_into<ThetaOp::LE>(left, right, out); break;
  }
}

}  // namespace detail

/// Evaluates every element pair of every task. Each worker lane runs its own
/// tasks into per-task slots; slots are merged in task order after all lanes
/// join, so the output does not depend on thread timing. elapsed_ms covers
/// this call only.
inline JoinOutput execute(const Schedule& sched, ThetaOp op) {
  const auto start = std::chrono::steady_clock::now();
  JoinOutput out;
  out.metrics = RunMetrics::zero(sched.workers);

  std::vector<std::vector<std::size_t>> lanes(sched.workers);
  for (std::size_t t = 0; t < sched.tasks.size(); ++t) {
    const auto w = sched.tasks[t].worker;
    if (w >= sched.workers) throw Error(ErrorCode::InvalidArgument, "task assigned to unknown worker");
    lanes[w].push_back(t);
  }

  std::vector<std::vector<JoinPair>> slots(sched.tasks.size());
  auto run_lane = [&](std::size_t w) {
    for (std::size_t t : lanes[w]) {
      const auto& task = sched.tasks[t];
      detail::cross_into(op, *task.left, *task.right, slots[t]);
    }
  };

  std::size_t busy = 0;
  for (const auto& lane : lanes) busy += lane.empty() ? 0 : 1;
  if (busy <= 1) {
    for (std::size_t w = 0; w < lanes.size(); ++w) run_lane(w);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(lanes.size());
    for (std::size_t w = 0; w < lanes.size(); ++w) {
      if (!lanes[w].empty()) threads.emplace_back(run_lane, w);
    }
  }  // jthreads join here

  std::size_t total = 0;
  for (const auto& s : slots) total += s.size();
  out.results.reserve(total);
  for (std::size_t t = 0; t < sched.tasks.size(); ++t) {
    const auto& task = sched.tasks[t];
    out.metrics.per_worker_in[task.worker] += task.pair_count();
    out.metrics.per_worker_out[task.worker] += slots[t].size();
    out.metrics.cartesian_count += task.pair_count();
    out.results.insert(out.results.end(), slots[t].begin(), slots[t].end());
  }
  out.metrics.result_count = out.results.size();
  out.metrics.finalize_balance();
  out.metrics.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------------------
// Range-partitioned pipeline

struct PipelineOptions {
  bool prefilter = true;
  bool amalgamate = true;
  bool repartition = true;
  bool integer_subspan_ceiling = false;
};

/// Intermediate state of one pipeline run, for inspection and tests.
struct PipelineTrace {
  Stream r_filtered;
  Stream s_filtered;
  std::optional<Boundary> r_boundary;
  std::optional<Boundary> s_boundary;
  std::optional<Boundary> amalgamated;
  PartitionPlan r_plan;
  PartitionPlan s_plan;
  std::size_t candidate_pairs = 0;
  std::size_t kept_pairs = 0;
};

inline double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

/// Pre-filter, partition (amalgamated or isolated), re-partition oversized
/// partitions, drop partition pairs that cannot join, then schedule and
/// evaluate. elapsed_ms covers every stage.
inline JoinOutput range_pipeline(ThetaOp op, const Stream& r, const Stream& s, const Config& cfg,
                                 const PipelineOptions& opts, PipelineTrace* trace = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  auto finish_empty = [&] {
    JoinOutput out;
    out.metrics = RunMetrics::zero(cfg.workers);
    out.metrics.elapsed_ms = elapsed_since(start);
    return out;
  };

  Stream rf;
  Stream sf;
  if (opts.prefilter) {
    auto filtered = prefilter_pair(op, r, s);
    rf = std::move(filtered.r);
    sf = std::move(filtered.s);
  } else {
    rf = r;
    sf = s;
  }
  if (rf.empty() || sf.empty()) {
    if (trace) {
      trace->r_filtered = std::move(rf);
      trace->s_filtered = std::move(sf);
    }
    return finish_empty();
  }

  const Boundary rb = boundary_of(rf, cfg.partitions);
  const Boundary sb = boundary_of(sf, cfg.partitions);
  PartitionPlan r_plan;
  PartitionPlan s_plan;
  std::optional<Boundary> apb;
  if (opts.amalgamate) {
    apb = amalgamate(rb, sb);
    r_plan = assign(rf, *apb);
    s_plan = assign(sf, *apb);
  } else {
    r_plan = assign(rf, rb);
    s_plan = assign(sf, sb);
  }
  if (opts.repartition) {
    const RepartitionOptions ro{opts.integer_subspan_ceiling};
    r_plan = repartition_oversized(r_plan, cfg.window, ro);
    s_plan = repartition_oversized(s_plan, cfg.window, ro);
  }

  const std::size_t candidates = r_plan.partitions.size() * s_plan.partitions.size();
  if (trace) {
    trace->r_filtered = rf;
    trace->s_filtered = sf;
    trace->r_boundary = rb;
    trace->s_boundary = sb;
    trace->amalgamated = apb;
    trace->r_plan = r_plan;
    trace->s_plan = s_plan;
  }

  auto tasks = pair_tasks(share(std::move(r_plan.partitions)), share(std::move(s_plan.partitions)), op);
  if (trace) {
    trace->candidate_pairs = candidates;
    trace->kept_pairs = tasks.size();
  }

  auto out = execute(schedule(std::move(tasks), cfg.workers), op);
  out.metrics.elapsed_ms = elapsed_since(start);
  return out;
}

inline PipelineOptions pipeline_options(const Config& cfg) {
  return {!cfg.disable_prefilter, !cfg.disable_amalgamation, !cfg.disable_repartition,
          cfg.integer_subspan_ceiling};
}

/// The full pipeline, honouring the config's ablation flags.
inline JoinOutput prefap_join(ThetaOp op, const Stream& r, const Stream& s, const Config& cfg,
                              PipelineTrace* trace = nullptr) {
  if (cfg.algorithm != Algorithm::PREFAP) throw Error(ErrorCode::InvalidConfig, "prefap_join needs algorithm prefap");
  cfg.validate();
  return range_pipeline(op, r, s, cfg, pipeline_options(cfg), trace);
}

}  // namespace prefap
