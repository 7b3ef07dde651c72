#pragma once

// Benchmark orchestration behind the prefap_bench CLI: stream preparation,
// per-window runs, aggregates, ablation deltas, significance tests, and
// JSON-lines / CSV output.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "prefap/baselines.hpp"
#include "prefap/core.hpp"
#include "prefap/datasource.hpp"
#include "prefap/multiway.hpp"
#include "prefap/oracle.hpp"
#include "prefap/stats.hpp"

namespace prefap::bench {

using json = nlohmann::ordered_json;

enum class RepeatMode { Seeds, Windows };
enum class Format { Json, Csv };

struct BenchOptions {
  Config config;
  std::size_t repeat = 1;
  RepeatMode repeat_mode = RepeatMode::Seeds;
  std::vector<std::filesystem::path> inputs;
  std::string column = "value";
  std::vector<std::string> dists{"uniform:20:50", "uniform:10:40", "uniform:0:30"};
  std::size_t n = 1000;
  bool significance = false;
  Format format = Format::Json;
};

struct RunRecord {
  std::string algo;
  std::string theta;
  std::uint64_t seed = 0;
  std::size_t window_index = 0;
  std::uint64_t cartesian_count = 0;
  std::uint64_t result_count = 0;
  double elapsed_ms = 0.0;
  double lb_in = 1.0;
  double lb_out = 1.0;
};

inline constexpr const char* kMetricNames[] = {"cartesian_count", "result_count", "elapsed_ms", "lb_in", "lb_out"};

/// The four metrics compared by the significance report.
inline constexpr const char* kSignificanceMetrics[] = {"cartesian_count", "elapsed_ms", "lb_in", "lb_out"};

inline double metric_of(const RunRecord& r, std::string_view name) {
  if (name == "cartesian_count") return static_cast<double>(r.cartesian_count);
  if (name == "result_count") return static_cast<double>(r.result_count);
  if (name == "elapsed_ms") return r.elapsed_ms;
  if (name == "lb_in") return r.lb_in;
  if (name == "lb_out") return r.lb_out;
  throw Error(ErrorCode::InvalidArgument, "unknown metric " + std::string(name));
}

struct Stat {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single run
};

inline Stat stat_of(const std::vector<double>& xs) {
  Stat st;
  if (xs.empty()) return st;
  const auto s = summarize(xs);
  st.mean = s.mean;
  st.min = *std::min_element(xs.begin(), xs.end());
  st.max = *std::max_element(xs.begin(), xs.end());
  st.stddev = std::sqrt(s.variance);
  return st;
}

struct AblationDelta {
  std::string variant;
  std::string metric;
  double full_mean = 0.0;
  double variant_mean = 0.0;
  std::optional<double> delta;  // (variant - full) / full; unset when full == 0
};

struct SignificanceRow {
  std::string metric;
  std::optional<TTestResult> test;  // unset for degenerate samples
};

struct BenchReport {
  std::vector<RunRecord> runs;
  std::vector<AblationDelta> ablation;
  std::vector<SignificanceRow> significance;

  std::vector<std::string> algos() const {
    std::vector<std::string> out;
    for (const auto& r : runs) {
      if (std::find(out.begin(), out.end(), r.algo) == out.end()) out.push_back(r.algo);
    }
    return out;
  }

  std::vector<double> samples(const std::string& algo, std::string_view metric) const {
    std::vector<double> out;
    for (const auto& r : runs) {
      if (r.algo == algo) out.push_back(metric_of(r, metric));
    }
    return out;
  }

  /// algo -> metric -> Stat, recomputed from the per-run rows.
  std::map<std::string, std::map<std::string, Stat>> aggregate() const {
    std::map<std::string, std::map<std::string, Stat>> out;
    for (const auto& algo : algos()) {
      for (const char* m : kMetricNames) out[algo][m] = stat_of(samples(algo, m));
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Stream preparation

/// splitmix64 finaliser; decorrelates per-stream seeds derived from one base.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::string theta_label(const std::vector<ThetaOp>& thetas) {
  std::string out;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (i) out += ",";
    out += to_string(thetas[i]);
  }
  return out;
}

inline const char* kStreamNames[] = {"R", "S", "T", "U", "V", "W"};

/// The full input streams for one repeat with base seed `seed`.
inline std::vector<Stream> prepare_streams(const BenchOptions& opts, std::uint64_t seed) {
  const std::size_t arity = opts.config.thetas.size() + 1;
  std::vector<Stream> streams;
  if (!opts.inputs.empty()) {
    if (opts.inputs.size() != arity) {
      throw Error(ErrorCode::InvalidConfig, "--input given " + std::to_string(opts.inputs.size()) +
                                                " times but the theta chain needs " + std::to_string(arity) +
                                                " streams");
    }
    for (const auto& path : opts.inputs) streams.push_back(load_csv(path, opts.column));
    return streams;
  }
  if (opts.dists.size() < arity) {
    throw Error(ErrorCode::InvalidConfig, "need a distribution for each of " + std::to_string(arity) + " streams");
  }
  if (opts.n < 1) throw Error(ErrorCode::InvalidConfig, "--n must be >= 1");
  for (std::size_t i = 0; i < arity; ++i) {
    DistSpec spec{parse_dist(opts.dists[i]), mix_seed(seed, i), opts.n};
    streams.push_back(generate(spec, i < std::size(kStreamNames) ? kStreamNames[i] : "X" + std::to_string(i)));
  }
  return streams;
}

/// Window i of every stream; the count is the minimum across streams.
inline std::vector<std::vector<Stream>> aligned_windows(const std::vector<Stream>& streams, std::size_t w) {
  std::vector<std::vector<Stream>> per_stream;
  std::size_t count = std::numeric_limits<std::size_t>::max();
  for (const auto& s : streams) {
    per_stream.push_back(windows(s, w));
    count = std::min(count, per_stream.back().size());
  }
  std::vector<std::vector<Stream>> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (auto& ws : per_stream) out[i].push_back(std::move(ws[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Running

/// Receives every satisfying tuple: (repeat, window, tuple).
using ResultSink = std::function<void(std::size_t, std::size_t, const JoinTuple&)>;

struct WindowOutcome {
  std::vector<JoinTuple> tuples;
  RunMetrics metrics;
};

inline WindowOutcome run_window(const std::vector<Stream>& window, const Config& cfg) {
  WindowOutcome out;
  if (cfg.thetas.size() == 1) {
    auto joined = theta_join(cfg.thetas[0], window[0], window[1], cfg);
    out.metrics = std::move(joined.metrics);
    out.tuples.reserve(joined.results.size());
    for (const auto& p : joined.results) out.tuples.push_back({p.left, p.right});
  } else {
    auto joined = multiway_join(window, cfg.thetas, cfg);
    out.metrics = std::move(joined.metrics);
    out.tuples = std::move(joined.results);
  }
  return out;
}

inline std::string algo_label(const Config& cfg) {
  std::string label(to_string(cfg.algorithm));
  std::vector<std::string> off;
  if (cfg.disable_prefilter) off.push_back("prefilter");
  if (cfg.disable_amalgamation) off.push_back("amalgamation");
  if (cfg.disable_repartition) off.push_back("repartition");
  for (const auto& o : off) label += "-" + o;
  return label;
}

/// Runs `cfg` over every repeat and aligned window, appending to `report`.
inline void run_variant(const BenchOptions& opts, const Config& cfg, BenchReport& report,
                        const ResultSink& sink = nullptr) {
  cfg.validate();
  if (opts.repeat < 1) throw Error(ErrorCode::InvalidConfig, "--repeat must be >= 1");
  const std::string label = algo_label(cfg);
  const std::string theta = theta_label(cfg.thetas);

  std::optional<std::vector<Stream>> fixed;
  for (std::size_t rep = 0; rep < opts.repeat; ++rep) {
    const std::uint64_t seed = opts.repeat_mode == RepeatMode::Seeds ? opts.config.seed + rep : opts.config.seed;
    std::vector<Stream> streams;
    if (opts.repeat_mode == RepeatMode::Windows || !opts.inputs.empty()) {
      if (!fixed) fixed = prepare_streams(opts, seed);
      streams = *fixed;
    } else {
      streams = prepare_streams(opts, seed);
    }
    const auto wins = aligned_windows(streams, cfg.window);
    for (std::size_t wi = 0; wi < wins.size(); ++wi) {
      Config run_cfg = cfg;
      run_cfg.seed = mix_seed(seed, 1000 + wi);
      auto outcome = run_window(wins[wi], run_cfg);
      if (sink) {
        for (const auto& t : outcome.tuples) sink(rep, wi, t);
      }
      const auto& m = outcome.metrics;
      report.runs.push_back({label, theta, seed, wi, m.cartesian_count, m.result_count, m.elapsed_ms, m.lb_in,
                             m.lb_out});
    }
  }
}

inline std::vector<Config> ablation_variants(const Config& base) {
  Config full = base;
  full.algorithm = Algorithm::PREFAP;
  full.disable_prefilter = false;
  full.disable_amalgamation = false;
  Config no_pre = full;
  no_pre.disable_prefilter = true;
  Config no_amal = full;
  no_amal.disable_amalgamation = true;
  Config both = full;
  both.disable_prefilter = true;
  both.disable_amalgamation = true;
  return {full, no_pre, no_amal, both};
}

inline void add_ablation_deltas(BenchReport& report, const std::vector<Config>& variants) {
  const auto agg = report.aggregate();
  const auto full_label = algo_label(variants.front());
  for (std::size_t i = 1; i < variants.size(); ++i) {
    const auto label = algo_label(variants[i]);
    for (const char* m : kMetricNames) {
      AblationDelta d{label, m, agg.at(full_label).at(m).mean, agg.at(label).at(m).mean, std::nullopt};
      if (d.full_mean != 0.0) d.delta = (d.variant_mean - d.full_mean) / d.full_mean;
      report.ablation.push_back(d);
    }
  }
}

/// One-sided tests of mean(candidate) < mean(baseline) on each metric.
inline void add_significance(BenchReport& report, const std::string& candidate, const std::string& baseline) {
  for (const char* m : kSignificanceMetrics) {
    const auto a = report.samples(candidate, m);
    const auto b = report.samples(baseline, m);
    SignificanceRow row{m, std::nullopt};
    try {
      row.test = welch_t_test(a, b);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSample) throw;
    }
    report.significance.push_back(row);
  }
}

inline BenchReport run_join(const BenchOptions& opts, const ResultSink& sink = nullptr) {
  BenchReport report;
  if (opts.significance) {
    if (opts.repeat < 2) throw Error(ErrorCode::InvalidConfig, "--significance needs --repeat >= 2");
    Config prefap = opts.config;
    prefap.algorithm = Algorithm::PREFAP;
    Config ftj = opts.config;
    ftj.algorithm = Algorithm::FTJ;
    ftj.disable_prefilter = ftj.disable_amalgamation = false;
    run_variant(opts, prefap, report, sink);
    run_variant(opts, ftj, report);
    add_significance(report, algo_label(prefap), algo_label(ftj));
  } else {
    run_variant(opts, opts.config, report, sink);
  }
  return report;
}

inline BenchReport run_ablation(const BenchOptions& opts) {
  if (opts.config.algorithm != Algorithm::PREFAP) {
    throw Error(ErrorCode::InvalidConfig, "ablation runs the prefap algorithm only");
  }
  BenchReport report;
  const auto variants = ablation_variants(opts.config);
  for (const auto& v : variants) run_variant(opts, v, report);
  add_ablation_deltas(report, variants);
  return report;
}

// ---------------------------------------------------------------------------
// Verification against the oracle

struct VerifyRow {
  std::uint64_t seed = 0;
  std::size_t window_index = 0;
  std::uint64_t result_count = 0;
  std::uint64_t oracle_count = 0;
  bool match = false;
};

inline std::vector<std::vector<PayloadId>> id_multiset(const std::vector<JoinTuple>& tuples) {
  std::vector<std::vector<PayloadId>> ids;
  ids.reserve(tuples.size());
  for (const auto& t : tuples) {
    std::vector<PayloadId> row;
    row.reserve(t.size());
    for (const auto& e : t) row.push_back(e.payload_id);
    ids.push_back(std::move(row));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline std::vector<VerifyRow> run_verify(const BenchOptions& opts) {
  opts.config.validate();
  std::vector<VerifyRow> rows;
  for (std::size_t rep = 0; rep < opts.repeat; ++rep) {
    const std::uint64_t seed = opts.repeat_mode == RepeatMode::Seeds ? opts.config.seed + rep : opts.config.seed;
    const auto streams = prepare_streams(opts, seed);
    const auto wins = aligned_windows(streams, opts.config.window);
    for (std::size_t wi = 0; wi < wins.size(); ++wi) {
      Config cfg = opts.config;
      cfg.seed = mix_seed(seed, 1000 + wi);
      const auto outcome = run_window(wins[wi], cfg);
      std::vector<JoinTuple> expected;
      if (cfg.thetas.size() == 1) {
        for (const auto& p : oracle_join(cfg.thetas[0], wins[wi][0], wins[wi][1]).results) {
          expected.push_back({p.left, p.right});
        }
      } else {
        expected = oracle_multiway(wins[wi], cfg.thetas);
      }
      rows.push_back({seed, wi, outcome.tuples.size(), expected.size(),
                      id_multiset(outcome.tuples) == id_multiset(expected)});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

inline json to_json(const RunRecord& r) {
  return json{{"algo", r.algo},
              {"theta", r.theta},
              {"seed", r.seed},
              {"window_index", r.window_index},
              {"cartesian_count", r.cartesian_count},
              {"result_count", r.result_count},
              {"elapsed_ms", r.elapsed_ms},
              {"lb_in", r.lb_in},
              {"lb_out", r.lb_out}};
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json aggregate_json(const BenchReport& report) {
  json doc;
  json agg = json::object();
  const auto stats = report.aggregate();
  for (const auto& algo : report.algos()) {
    json per_metric = json::object();
    for (const char* m : kMetricNames) {
      const auto& st = stats.at(algo).at(m);
      per_metric[m] = json{{"mean", st.mean}, {"min", st.min}, {"max", st.max}, {"stddev", st.stddev}};
    }
    agg[algo] = std::move(per_metric);
  }
  doc["aggregate"] = std::move(agg);

  if (!report.ablation.empty()) {
    json abl = json::object();
    for (const auto& d : report.ablation) {
      abl[d.variant][d.metric] = json{{"full_mean", d.full_mean},
                                      {"variant_mean", d.variant_mean},
                                      {"delta", optional_number(d.delta)},
                                      {"delta_pct", optional_number(d.delta ? std::optional(*d.delta * 100.0) : std::nullopt)}};
    }
    doc["ablation"] = std::move(abl);
  }
  if (!report.significance.empty()) {
    json sig = json::object();
    for (const auto& row : report.significance) {
      if (!row.test) {
        sig[row.metric] = json{{"degenerate", true}};
        continue;
      }
      const auto& t = *row.test;
      sig[row.metric] = json{{"t", finite_or_null(t.t)},
                             {"df", t.df},
                             {"p_value", t.p_value},
                             {"neg_log_p", finite_or_null(t.neg_log_p)},
                             {"significant", t.p_value < 0.05}};
    }
    doc["significance"] = std::move(sig);
  }
  return doc;
}

/// Shortest round-trip decimal form.
inline std::string fmt_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void write_report(const BenchReport& report, Format format, std::ostream& os) {
  if (format == Format::Json) {
    for (const auto& r : report.runs) os << to_json(r).dump() << '\n';
    os << aggregate_json(report).dump() << '\n';
    return;
  }

  os << "algo,theta,seed,window_index,cartesian_count,result_count,elapsed_ms,lb_in,lb_out\n";
  for (const auto& r : report.runs) {
    os << r.algo << ',' << '"' << r.theta << '"' << ',' << r.seed << ',' << r.window_index << ','
       << r.cartesian_count << ',' << r.result_count << ',' << fmt_double(r.elapsed_ms) << ','
       << fmt_double(r.lb_in) << ',' << fmt_double(r.lb_out) << '\n';
  }
  os << "\nalgo,metric,mean,min,max,stddev\n";
  const auto stats = report.aggregate();
  for (const auto& algo : report.algos()) {
    for (const char* m : kMetricNames) {
      const auto& st = stats.at(algo).at(m);
      os << algo << ',' << m << ',' << fmt_double(st.mean) << ',' << fmt_double(st.min) << ','
         << fmt_double(st.max) << ',' << fmt_double(st.stddev) << '\n';
    }
  }
  if (!report.ablation.empty()) {
    os << "\nvariant,metric,full_mean,variant_mean,delta\n";
    for (const auto& d : report.ablation) {
      os << d.variant << ',' << d.metric << ',' << fmt_double(d.full_mean) << ',' << fmt_double(d.variant_mean)
         << ',' << (d.delta ? fmt_double(*d.delta) : "") << '\n';
    }
  }
  if (!report.significance.empty()) {
    os << "\nmetric,t,df,p_value,neg_log_p\n";
    for (const auto& row : report.significance) {
      os << row.metric;
      if (row.test) {
        os << ',' << fmt_double(row.test->t) << ',' << fmt_double(row.test->df) << ','
           << fmt_double(row.test->p_value) << ',' << fmt_double(row.test->neg_log_p);
      } else {
        os << ",,,,";
      }
      os << '\n';
    }
  }
}

}  // namespace prefap::bench
