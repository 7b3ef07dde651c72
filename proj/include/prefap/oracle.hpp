#pragma once

// Brute-force nested-loop theta-join. Ground truth for correctness checks.

#include <cstdint>
#include <vector>

#include "prefap/core.hpp"

namespace prefap {

struct OracleResult {
  std::vector<JoinPair> results;  // (r-index, s-index) order
  std::uint64_t pair_count = 0;
};

inline OracleResult oracle_join(ThetaOp op, const Stream& r, const Stream& s) {
  OracleResult out;
  for (const auto& x : r.elements) {
    for (const auto& y : s.elements) {
      if (theta_holds(op, x.value, y.value)) out.results.push_back({x, y});
    }
  }
  out.pair_count = static_cast<std::uint64_t>(r.size()) * s.size();
  return out;
}

/// Every tuple of streams[0] x ... x streams[n-1] whose adjacent values
/// satisfy thetas[i], in lexicographic index order. Enumerates the full
/// product; `visited` receives the number of candidate tuples examined.
inline std::vector<JoinTuple> oracle_multiway(const std::vector<Stream>& streams,
                                              const std::vector<ThetaOp>& thetas,
                                              std::uint64_t* visited = nullptr) {
  if (streams.size() < 2 || thetas.size() + 1 != streams.size()) {
    throw Error(ErrorCode::ArityMismatch, "need |thetas| + 1 == |streams| >= 2");
  }
  std::vector<JoinTuple> out;
  std::uint64_t count = 0;
  JoinTuple current;
  current.reserve(streams.size());

  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == streams.size()) {
      ++count;
      for (std::size_t i = 0; i < thetas.size(); ++i) {
        if (!theta_holds(thetas[i], current[i].value, current[i + 1].value)) return;
      }
      out.push_back(current);
      return;
    }
    for (const auto& e : streams[depth].elements) {
      current.push_back(e);
      self(self, depth + 1);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
  if (visited) *visited = count;
  return out;
}

}  // namespace prefap
