#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "prefap/joiner.hpp"
#include "prefap/oracle.hpp"
#include "test_support.hpp"

using namespace prefap;
using prefap::testing::id_pairs;

namespace {

Partition part_of(std::vector<double> values, std::size_t first_id = 0) {
  std::vector<Element> elems;
  for (std::size_t i = 0; i < values.size(); ++i) elems.push_back({values[i], first_id + i});
  const auto ex = *extremes_of(elems);
  return Partition({ex.min, ex.max, true}, std::move(elems));
}

Schedule schedule_of_sizes(const std::vector<std::size_t>& sizes, std::size_t workers) {
  SharedPartitions left;
  for (auto n : sizes) left.push_back(std::make_shared<const Partition>(part_of(std::vector<double>(n, 1.0))));
  SharedPartitions right{std::make_shared<const Partition>(part_of({0.0}))};
  return schedule(pair_tasks(left, right, std::nullopt), workers);
}

std::vector<std::uint64_t> loads(const Schedule& s) {
  std::vector<std::uint64_t> l(s.workers, 0);
  for (const auto& t : s.tasks) l[t.worker] += t.pair_count();
  return l;
}

Config config(std::size_t p, std::size_t w, std::size_t workers) {
  Config cfg;
  cfg.partitions = p;
  cfg.window = w;
  cfg.workers = workers;
  return cfg;
}

}  // namespace

TEST(PartitionFilter, BoundaryEquality) {
  const auto a = part_of({3, 5});
  const auto b = part_of({5, 8});
  EXPECT_FALSE(partition_filter(ThetaOp::GT, a, b));  // 5 > 5 fails
  EXPECT_TRUE(partition_filter(ThetaOp::GE, a, b));
  EXPECT_TRUE(partition_filter(ThetaOp::LT, a, b));
  EXPECT_FALSE(partition_filter(ThetaOp::GT, part_of({1, 2}), part_of({2, 3})));
  EXPECT_FALSE(partition_filter(ThetaOp::LT, part_of({8, 9}), part_of({2, 8})));
  EXPECT_TRUE(partition_filter(ThetaOp::LE, part_of({8, 9}), part_of({2, 8})));
}

TEST(PartitionFilter, SafetyProperty) {
  // A dropped pair never contains a joining element pair.
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_int_distribution<int> val(0, 12);
  for (int i = 0; i < 3000; ++i) {
    std::vector<double> a(len(rng)), b(len(rng));
    for (auto& x : a) x = val(rng);
    for (auto& x : b) x = val(rng);
    const auto pa = part_of(a);
    const auto pb = part_of(b);
    for (ThetaOp op : kAllThetaOps) {
      bool any = false;
      for (double x : a)
        for (double y : b) any = any || theta_holds(op, x, y);
      EXPECT_EQ(partition_filter(op, pa, pb), any);
    }
  }
}

TEST(Schedule, GreedyGolden) {
  const auto s = schedule_of_sizes({8, 5, 5, 2}, 2);
  auto l = loads(s);
  EXPECT_EQ(l, (std::vector<std::uint64_t>{10, 10}));

  // exhaustive check that no 2-worker assignment beats the greedy makespan
  const std::vector<std::uint64_t> w{8, 5, 5, 2};
  std::uint64_t best = ~0ull;
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::uint64_t a = 0, b = 0;
    for (unsigned i = 0; i < 4; ++i) ((mask >> i) & 1 ? a : b) += w[i];
    best = std::min(best, std::max(a, b));
  }
  EXPECT_EQ(*std::max_element(l.begin(), l.end()), best);
}

TEST(Schedule, SingleWorkerAndTieBreak) {
  const auto one = schedule_of_sizes({3, 1, 4}, 1);
  EXPECT_EQ(loads(one), (std::vector<std::uint64_t>{8}));

  const auto ties = schedule_of_sizes({2, 2, 2, 2}, 3);
  ASSERT_EQ(ties.tasks.size(), 4u);
  EXPECT_EQ(ties.tasks[0].worker, 0u);
  EXPECT_EQ(ties.tasks[1].worker, 1u);
  EXPECT_EQ(ties.tasks[2].worker, 2u);
  EXPECT_EQ(ties.tasks[3].worker, 0u);
  EXPECT_THROW(schedule({}, 0), Error);
}

TEST(Schedule, LptBound) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> sz(1, 40);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::size_t> sizes(1 + i % 17);
    for (auto& x : sizes) x = sz(rng);
    for (std::size_t workers : {1, 2, 3, 4, 8}) {
      const auto s = schedule_of_sizes(sizes, workers);
      const auto l = loads(s);
      const std::uint64_t total = std::accumulate(l.begin(), l.end(), std::uint64_t{0});
      const std::uint64_t biggest = *std::max_element(sizes.begin(), sizes.end());
      // list-scheduling bound: average load plus one task
      const double bound = static_cast<double>(total) / workers + static_cast<double>(biggest);
      EXPECT_LE(*std::max_element(l.begin(), l.end()), bound + 1e-9);
    }
  }
}

TEST(Execute, SmallGolden) {
  SharedPartitions left{std::make_shared<const Partition>(part_of({5, 9}))};
  SharedPartitions right{std::make_shared<const Partition>(part_of({4, 9}))};
  const auto out = execute(schedule(pair_tasks(left, right, ThetaOp::GT), 2), ThetaOp::GT);
  EXPECT_EQ(out.metrics.cartesian_count, 4u);
  ASSERT_EQ(out.results.size(), 2u);
  EXPECT_EQ(out.results[0].left.value, 5);
  EXPECT_EQ(out.results[0].right.value, 4);
  EXPECT_EQ(out.results[1].left.value, 9);
  EXPECT_EQ(out.results[1].right.value, 4);
  EXPECT_EQ(out.metrics.per_worker_in, (std::vector<std::uint64_t>{4, 0}));
  EXPECT_DOUBLE_EQ(out.metrics.lb_in, 2.0);
}

TEST(Execute, EmptySchedule) {
  const auto out = execute(Schedule{{}, 3}, ThetaOp::LE);
  EXPECT_EQ(out.metrics.cartesian_count, 0u);
  EXPECT_DOUBLE_EQ(out.metrics.lb_in, 1.0);
  EXPECT_DOUBLE_EQ(out.metrics.lb_out, 1.0);
}

TEST(Pipeline, WorkedExampleTrace) {
  const auto r = prefap::testing::iota_stream("r", 0, 9);
  const auto s = prefap::testing::iota_stream("s", 0, 12);
  PipelineTrace trace;
  const auto out = prefap_join(ThetaOp::GT, r, s, config(3, 1000, 2), &trace);
  EXPECT_EQ(stream_extremes(trace.r_filtered), (Extremes{1, 9}));
  EXPECT_EQ(stream_extremes(trace.s_filtered), (Extremes{0, 8}));
  ASSERT_TRUE(trace.amalgamated.has_value());
  EXPECT_EQ(trace.amalgamated->interval_count(), 7u);
  EXPECT_EQ(trace.r_plan.partitions.size(), 6u);
  EXPECT_EQ(trace.s_plan.partitions.size(), 7u);
  EXPECT_EQ(trace.candidate_pairs, 42u);
  EXPECT_EQ(trace.kept_pairs, 24u);
  EXPECT_EQ(out.metrics.cartesian_count, 52u);
  EXPECT_EQ(out.metrics.result_count, 45u);
  EXPECT_EQ(id_pairs(out.results), id_pairs(oracle_join(ThetaOp::GT, r, s).results));
}

TEST(Pipeline, EmptyInputsAndFilteredOut) {
  const auto r = Stream::from_values("r", {1, 2});
  auto out = prefap_join(ThetaOp::GT, r, Stream{}, config(3, 100, 2));
  EXPECT_EQ(out.metrics.cartesian_count, 0u);
  EXPECT_EQ(out.metrics.per_worker_in.size(), 2u);
  out = prefap_join(ThetaOp::GT, r, Stream::from_values("s", {5, 6}), config(3, 100, 2));
  EXPECT_TRUE(out.results.empty());
  EXPECT_EQ(out.metrics.cartesian_count, 0u);
}

TEST(Pipeline, RejectsWrongAlgorithm) {
  auto cfg = config(3, 100, 2);
  cfg.algorithm = Algorithm::FTJ;
  EXPECT_THROW(prefap_join(ThetaOp::LE, Stream{}, Stream{}, cfg), Error);
}

TEST(Pipeline, AllOptionCombinationsMatchOracle) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 150; ++i) {
    const auto r = prefap::testing::random_int_stream(rng, "r", 80, 0, 40);
    const auto s = prefap::testing::random_int_stream(rng, "s", 80, 10, 50);
    for (ThetaOp op : kAllThetaOps) {
      const auto expected = id_pairs(oracle_join(op, r, s).results);
      for (unsigned mask = 0; mask < 8; ++mask) {
        const PipelineOptions opts{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0, false};
        const auto out = range_pipeline(op, r, s, config(1 + i % 7, 40, 3), opts);
        EXPECT_EQ(id_pairs(out.results), expected);
        EXPECT_GE(out.metrics.cartesian_count, out.metrics.result_count);
      }
    }
  }
}

TEST(Pipeline, RefinementDominanceWithoutRepartition) {
  // Amalgamated partitions refine isolated ones, so with pre-filtering and
  // re-partitioning off the amalgamated run never evaluates more pairs.
  std::mt19937_64 rng(57);
  for (int i = 0; i < 300; ++i) {
    const auto r = prefap::testing::random_real_stream(rng, "r", 60, 0, 100);
    const auto s = prefap::testing::random_real_stream(rng, "s", 60, 30, 130);
    for (ThetaOp op : kAllThetaOps) {
      const auto cfg = config(2 + i % 9, 1000, 4);
      const auto amal = range_pipeline(op, r, s, cfg, {false, true, false, false});
      const auto iso = range_pipeline(op, r, s, cfg, {false, false, false, false});
      EXPECT_LE(amal.metrics.cartesian_count, iso.metrics.cartesian_count);
    }
  }
}

TEST(Pipeline, OutputIndependentOfWorkerCount) {
  std::mt19937_64 rng(8);
  const auto r = prefap::testing::random_real_stream(rng, "r", 500, 0, 100);
  const auto s = prefap::testing::random_real_stream(rng, "s", 500, 20, 120);
  const auto base = prefap_join(ThetaOp::LE, r, s, config(10, 100, 1));
  for (std::size_t workers : {2, 3, 8}) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto out = prefap_join(ThetaOp::LE, r, s, config(10, 100, workers));
      EXPECT_EQ(out.results, base.results);
      EXPECT_EQ(out.metrics.cartesian_count, base.metrics.cartesian_count);
      EXPECT_GE(out.metrics.lb_in, 1.0);
      EXPECT_LE(out.metrics.lb_in, static_cast<double>(workers));
    }
  }
}
