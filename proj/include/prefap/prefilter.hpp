#pragma once

// Stream-level pre-filtering: drop elements that cannot join with anything
// in the opposite stream, judged only by that stream's extremes.

#include <cstddef>

#include "prefap/core.hpp"

namespace prefap {

struct PrefilteredPair {
  Stream r;
  Stream s;
  /// Element reads performed (extremes scan plus removal scan).
  std::size_t element_visits = 0;
};

namespace detail {

template <class Keep>
Stream keep_if(const Stream& in, Keep keep, std::size_t& visits) {
  Stream out{in.name, {}};
  out.elements.reserve(in.size());
  for (const auto& e : in.elements) {
    ++visits;
    if (keep(e.value)) out.elements.push_back(e);
  }
  return out;
}

}  // namespace detail

/// One pass, no sorting. Both thresholds are read from the unfiltered
/// inputs; if either input is empty both outputs are empty.
inline PrefilteredPair prefilter_pair(ThetaOp op, const Stream& r, const Stream& s) {
  PrefilteredPair out;
  out.r.name = r.name;
  out.s.name = s.name;

  const auto rx = stream_extremes(r);
  const auto sx = stream_extremes(s);
  out.element_visits = r.size() + s.size();
  if (!rx || !sx) return out;

  auto& v = out.element_visits;
  switch (op) {
    case ThetaOp::GT:
      out.r = detail::keep_if(r, [t = sx->min](double x) { return x > t; }, v);
      out.s = detail::keep_if(s, [t = rx->max](double y) { return y < t; }, v);
      break;
    case ThetaOp::GE:
      out.r = detail::keep_if(r, [t = sx->min](double x) { return x >= t; }, v);
      out.s = detail::keep_if(s, [t = rx->max](double y) { return y <= t; }, v);
      break;
    case ThetaOp::LT:
      out.r = detail::keep_if(r, [t = sx->max](double x) { return x < t; }, v);
      out.s = detail::keep_if(s, [t = rx->min](double y) { return y > t; }, v);
      break;
    case ThetaOp::LE:
      out.r = detail::keep_if(r, [t = sx->max](double x) { return x <= t; }, v);
      out.s = detail::keep_if(s, [t = rx->min](double y) { return y >= t; }, v);
      break;
  }
  return out;
}

}  // namespace prefap
