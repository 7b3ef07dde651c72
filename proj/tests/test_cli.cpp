#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"

using prefap::testing::mask_timing;
using prefap::testing::run_cli;
using json = nlohmann::json;

namespace {

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

std::string data(const char* name) { return std::string(PREFAP_TEST_DATA_DIR) + "/" + name; }

const std::string kSmall = " --n 300 --window 100 --partitions 5 --workers 3 --seed 7";

}  // namespace

TEST(Cli, JoinSmoke) {
  const auto r = run_cli("join --algo prefap --theta gt" + kSmall);
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto docs = json_lines(r.out);
  ASSERT_EQ(docs.size(), 4u);
  EXPECT_EQ(docs[0]["algo"], "prefap");
  EXPECT_EQ(docs[0]["theta"], "gt");
  EXPECT_TRUE(docs[3].contains("aggregate"));
}

TEST(Cli, BenchAliasAndCsv) {
  const auto r = run_cli("bench --algo rbm --format csv" + kSmall);
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("algo,theta,seed,window_index", 0), 0u);
}

TEST(Cli, FtjEqualsPrefapWithBothAblations) {
  const auto f = json_lines(run_cli("join --algo ftj" + kSmall).out);
  const auto p = json_lines(run_cli("join --algo prefap --ablate prefilter,amalgamation" + kSmall).out);
  ASSERT_EQ(f.size(), p.size());
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    EXPECT_EQ(f[i]["cartesian_count"], p[i]["cartesian_count"]);
    EXPECT_EQ(f[i]["result_count"], p[i]["result_count"]);
  }
}

TEST(Cli, CsvInputs) {
  const auto r = run_cli("join --input " + data("stock.csv") + " --input " + data("stock.csv") +
                         " --column high --theta ge");
  ASSERT_EQ(r.exit_code, 0);
  const auto docs = json_lines(r.out);
  EXPECT_EQ(docs[0]["result_count"], 6);
}

TEST(Cli, ExitCodes) {
  auto r = run_cli("join --input /nonexistent/x.csv --input /nonexistent/y.csv", true);
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(r.out.rfind("error: ", 0), 0u) << r.out;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);

  r = run_cli("join --input " + data("nan.csv") + " --input " + data("value.csv"), true);
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.out.find(":3:"), std::string::npos) << r.out;

  EXPECT_EQ(run_cli("join --bogus").exit_code, 2);
  EXPECT_EQ(run_cli("join --algo nope").exit_code, 2);
  EXPECT_EQ(run_cli("join --partitions 0").exit_code, 2);
  EXPECT_EQ(run_cli("join --algo ftj --ablate prefilter").exit_code, 2);
  EXPECT_EQ(run_cli("join --dist-r uniform:5:1").exit_code, 2);
  EXPECT_EQ(run_cli("join --significance --repeat 1").exit_code, 2);
  EXPECT_EQ(run_cli("").exit_code, 2);
}

TEST(Cli, WorkersEnvOverride) {
  const auto r = run_cli("join" + kSmall, false, "PREFAP_WORKERS=2");
  ASSERT_EQ(r.exit_code, 0);
  const auto docs = json_lines(r.out);
  for (std::size_t i = 0; i + 1 < docs.size(); ++i) EXPECT_LE(docs[i]["lb_in"].get<double>(), 2.0);
  EXPECT_EQ(run_cli("join" + kSmall, false, "PREFAP_WORKERS=zero").exit_code, 2);
}

TEST(Cli, DeterministicOutput) {
  for (const char* algo : {"rbm", "obt", "cfs", "ftj", "prefap"}) {
    const std::string args = std::string("join --algo ") + algo + " --repeat 2" + kSmall;
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_EQ(mask_timing(a.out), mask_timing(b.out)) << algo;
  }
}

TEST(Cli, SignificanceReport) {
  const auto r = run_cli("join --significance --repeat 5" + kSmall);
  ASSERT_EQ(r.exit_code, 0);
  const auto docs = json_lines(r.out);
  const auto& sig = docs.back()["significance"];
  for (const char* m : {"cartesian_count", "elapsed_ms", "lb_in", "lb_out"}) {
    ASSERT_TRUE(sig.contains(m)) << m;
    if (!sig[m].contains("degenerate")) { EXPECT_TRUE(sig[m].contains("neg_log_p")) << m; }
  }
}

TEST(Cli, AblationAndVerify) {
  auto r = run_cli("ablation" + kSmall);
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_TRUE(json_lines(r.out).back().contains("ablation"));

  r = run_cli("verify --algo cfs --theta lt,ge --n 40 --window 40");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  for (const auto& doc : json_lines(r.out)) EXPECT_TRUE(doc["match"].get<bool>());
}

TEST(Cli, DumpResults) {
  const std::string path = ::testing::TempDir() + "prefap_dump.csv";
  const auto r = run_cli("join --theta gt --n 20 --window 20 --dump-results " + path);
  ASSERT_EQ(r.exit_code, 0);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "repeat,window,r_id,r_value,s_id,s_value");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, json_lines(r.out)[0]["result_count"].get<std::size_t>());
}
