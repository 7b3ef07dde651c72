#pragma once

// One-sided Welch t-test used by the significance report.

#include <cmath>
#include <limits>
#include <span>

#include <boost/math/distributions/students_t.hpp>

#include "prefap/core.hpp"

namespace prefap {

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n - 1)
};

inline SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  s.n = xs.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / static_cast<double>(s.n - 1);
  }
  return s;
}

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 0.5;
  /// Natural log; +inf when p underflows to 0.
  double neg_log_p = -std::log(0.5);
};

/// Welch's t-test of H1: mean(a) < mean(b). p = P(T_df <= t).
inline TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::InvalidArgument, "t-test needs at least 2 samples per side");
  const auto sa = summarize(a);
  const auto sb = summarize(b);
  const double va = sa.variance / static_cast<double>(sa.n);
  const double vb = sb.variance / static_cast<double>(sb.n);
  const double se2 = va + vb;

  TTestResult res;
  if (se2 == 0.0) {
    if (sa.mean == sb.mean) throw Error(ErrorCode::DegenerateSample, "both samples are constant and equal");
    res.t = sa.mean < sb.mean ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    res.df = static_cast<double>(sa.n + sb.n - 2);
    res.p_value = sa.mean < sb.mean ? 0.0 : 1.0;
  } else {
    res.t = (sa.mean - sb.mean) / std::sqrt(se2);
    const double denom = va * va / static_cast<double>(sa.n - 1) + vb * vb / static_cast<double>(sb.n - 1);
    res.df = se2 * se2 / denom;
    boost::math::students_t dist(res.df);
    res.p_value = boost::math::cdf(dist, res.t);
  }
  res.neg_log_p = res.p_value > 0.0 ? -std::log(res.p_value) : std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace prefap
