#pragma once

// Left-to-right multi-way cascade: join the first two streams, project each
// intermediate tuple onto its rightmost value, join that against the next
// stream, and expand matches back into full tuples.

#include <chrono>
#include <vector>

#include "prefap/baselines.hpp"
#include "prefap/core.hpp"

namespace prefap {

struct MultiwayOutput {
  std::vector<JoinTuple> results;
  /// Summed over stages.
  RunMetrics metrics;
  std::vector<RunMetrics> stages;
};

inline MultiwayOutput multiway_join(const std::vector<Stream>& streams, const std::vector<ThetaOp>& thetas,
                                    const Config& cfg) {
  if (streams.size() < 2 || thetas.size() + 1 != streams.size()) {
    throw Error(ErrorCode::ArityMismatch, "need |thetas| + 1 == |streams| >= 2");
  }
  const auto start = std::chrono::steady_clock::now();
  MultiwayOutput out;
  out.metrics = RunMetrics::zero(cfg.workers);

  // Intermediate tuples stored row-major with `arity` elements per row.
  std::size_t arity = 1;
  std::vector<Element> rows = streams[0].elements;

  for (std::size_t stage = 0; stage < thetas.size(); ++stage) {
    // Derived stream: one element per intermediate tuple, id = row index.
    Stream left{stage == 0 ? streams[0].name : "stage" + std::to_string(stage), {}};
    const std::size_t n = rows.size() / arity;
    left.elements.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      left.elements.push_back({rows[(i + 1) * arity - 1].value, static_cast<PayloadId>(i)});
    }

    const Stream& right = streams[stage + 1];
    JoinOutput joined = theta_join(thetas[stage], left, right, cfg);
    out.stages.push_back(joined.metrics);
    out.metrics.accumulate(joined.metrics);

    std::vector<Element> next;
    next.reserve(joined.results.size() * (arity + 1));
    for (const auto& pair : joined.results) {
      const auto row = static_cast<std::size_t>(pair.left.payload_id);
      next.insert(next.end(), rows.begin() + static_cast<std::ptrdiff_t>(row * arity),
                  rows.begin() + static_cast<std::ptrdiff_t>((row + 1) * arity));
      next.push_back(pair.right);
    }
    rows = std::move(next);
    ++arity;
  }

  const std::size_t count = rows.size() / arity;
  out.results.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.results.emplace_back(rows.begin() + static_cast<std::ptrdiff_t>(i * arity),
                             rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * arity));
  }
  out.metrics.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace prefap
