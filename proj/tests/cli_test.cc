#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "batch.h"
#include "cli.h"
#include "json.hpp"

namespace swarmkit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("swarmkit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path small_config() {
    return write("small.json", R"({
      "name": "small", "num_pieces": 60, "piece_size_kb": 64, "seed_capacity": 32,
      "leecher_capacity": 48, "arrivals": {"poisson_rate": 0.02, "horizon": 2000},
      "sim_end": 2500, "warmup": 200, "rng_seed": 17})");
  }

  fs::path dir_;
};

TEST_F(CliTest, RatesWorkedExample) {
  const auto r = call({"rates", "--cs", "60", "--cl", "96,96,96", "--b", "30,20,10", "--json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["download"], json::parse("[60.0, 136.0, 144.0]"));
  EXPECT_TRUE(j["interest_bounds"][0][1].is_null());
  EXPECT_EQ(j["interest_bounds"][2][1], 68.0);
}

TEST_F(CliTest, RatesTextAndBroadcastCapacity) {
  const auto r = call({"rates", "--cs", "64", "--cl", "64", "--b", "100,100,100,100,100"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("download rates d: 64 64 64 64 64"), std::string::npos) << r.out;
  EXPECT_NE(call({"rates", "--cs", "64", "--cl", "64", "--b", "500"}).out.find("d: 64\n"),
            std::string::npos);
}

TEST_F(CliTest, RatesFromStateFile) {
  const auto p = write("state.json", R"({"seed_capacity": 60, "leecher_capacities": 96,
                                          "piece_counts": [30, 20, 10]})");
  const auto r = call({"rates", "--state", p.string(), "--json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["download"][2], 144.0);
}

TEST_F(CliTest, RatesInvalidStateIsUsageError) {
  EXPECT_EQ(call({"rates", "--cs", "64", "--cl", "64,64", "--b", "1,2,3"}).code, kExitUsage);
  EXPECT_EQ(call({"rates", "--cs", "64", "--cl", "64", "--b", "-4"}).code, kExitUsage);
  EXPECT_EQ(call({"rates"}).code, kExitUsage);
}

TEST_F(CliTest, BurstBoundsRows) {
  const auto a = json::parse(
      call({"burst-bounds", "--interarrival", "1000", "--cs", "48", "--cl", "64", "--json"}).out);
  EXPECT_NEAR(a["b_min_ratio"].get<double>(), 0.312, 0.0005);
  EXPECT_NEAR(a["b_max_ratio"].get<double>(), 0.821, 0.0005);
  const auto b = json::parse(
      call({"burst-bounds", "--arrival-rate", "0.001", "--cs", "64", "--cl", "64", "--json"}).out);
  EXPECT_NEAR(b["b_min_ratio"].get<double>(), 0.100, 0.0005);
  EXPECT_NEAR(b["b_max_ratio"].get<double>(), 0.474, 0.0005);
  const auto c = json::parse(
      call({"burst-bounds", "--interarrival", "1000", "--cs", "128", "--cl", "64", "--json"}).out);
  EXPECT_FALSE(c["burst_possible"].get<bool>());
}

TEST_F(CliTest, BurstBoundsNeedsExactlyOneRate) {
  EXPECT_EQ(call({"burst-bounds", "--cs", "48", "--cl", "64"}).code, kExitUsage);
  EXPECT_EQ(call({"burst-bounds", "--interarrival", "1", "--arrival-rate", "1", "--cs", "48",
                  "--cl", "64"})
                .code,
            kExitUsage);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(call({}).code, kExitUsage);
  EXPECT_EQ(call({"teleport"}).code, kExitUsage);
  EXPECT_EQ(call({"simulate", "--config", (dir_ / "missing.json").string()}).code, kExitUsage);
  EXPECT_EQ(call({"simulate", "--config", write("bad.json", "{").string()}).code, kExitUsage);
  EXPECT_EQ(call({"validate", "--protocol", "nope"}).code, kExitUsage);
  EXPECT_EQ(call({"--help"}).code, kExitOk);
}

TEST_F(CliTest, SimulateWritesLayout) {
  const auto r = call({"simulate", "--config", small_config().string(), "--replications", "3",
                       "--jobs", "2", "--out", dir_.string(), "--json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto root = dir_ / "small";
  for (const char* f : {"manifest.json", "metrics.csv", "interdeparture_ccdf.csv",
                        "download_ccdf.csv", "order_stats.csv"}) {
    EXPECT_TRUE(fs::exists(root / f)) << f;
  }
  std::set<std::uint64_t> seeds;
  for (int k = 0; k < 3; ++k) {
    const auto rep = root / std::to_string(k);
    for (const char* f : {"trace.csv", "summary.csv", "manifest.json"}) {
      EXPECT_TRUE(fs::exists(rep / f)) << rep / f;
    }
    const auto m = json::parse(slurp(rep / "manifest.json"));
    seeds.insert(m["rng_seed"].get<std::uint64_t>());
    EXPECT_EQ(m["config_hash"], "fnv1a64:" + hex64(fnv1a64(slurp(dir_ / "small.json"))));
  }
  EXPECT_EQ(seeds.size(), 3u);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["replications"].size(), 3u);
}

TEST_F(CliTest, SimulateIsReproducible) {
  const auto cfg = small_config().string();
  ASSERT_EQ(call({"simulate", "--config", cfg, "--replications", "2", "--out",
                  (dir_ / "a").string()})
                .code,
            kExitOk);
  ASSERT_EQ(call({"simulate", "--config", cfg, "--replications", "2", "--jobs", "1", "--out",
                  (dir_ / "b").string()})
                .code,
            kExitOk);
  for (const char* f : {"0/trace.csv", "1/trace.csv", "1/summary.csv", "metrics.csv"}) {
    EXPECT_EQ(slurp(dir_ / "a/small" / f), slurp(dir_ / "b/small" / f)) << f;
  }
}

TEST_F(CliTest, ManifestRerunReproducesReplication) {
  const auto cfg = small_config().string();
  ASSERT_EQ(call({"simulate", "--config", cfg, "--replications", "2", "--out",
                  (dir_ / "a").string()})
                .code,
            kExitOk);
  const auto manifest = dir_ / "a/small/1/manifest.json";
  ASSERT_EQ(call({"simulate", "--config", manifest.string(), "--out", (dir_ / "b").string()}).code,
            kExitOk);
  EXPECT_EQ(slurp(dir_ / "a/small/1/trace.csv"), slurp(dir_ / "b/small/0/trace.csv"));
}

TEST_F(CliTest, SweepCreatesOneDirectoryPerValue) {
  ASSERT_EQ(call({"simulate", "--config", small_config().string(), "--sweep-interarrival",
                  "40,80", "--out", dir_.string()})
                .code,
            kExitOk);
  EXPECT_TRUE(fs::exists(dir_ / "small-ia40" / "0" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "small-ia80" / "0" / "trace.csv"));
}

TEST_F(CliTest, MetricsRecomputesFromTraces) {
  ASSERT_EQ(call({"simulate", "--config", small_config().string(), "--replications", "2",
                  "--out", dir_.string()})
                .code,
            kExitOk);
  const auto r = call({"metrics", "--input", (dir_ / "small").string(), "--out",
                       (dir_ / "again").string(), "--json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(slurp(dir_ / "small/metrics.csv"), slurp(dir_ / "again/metrics.csv"));
  EXPECT_EQ(json::parse(r.out).size(), 3u);
  EXPECT_EQ(call({"metrics", "--input", (dir_ / "nothing").string()}).code, kExitUsage);
}

TEST_F(CliTest, ValidateExitCodes) {
  EXPECT_EQ(call({"validate", "--tolerance", "100"}).code, kExitOk);
  const auto r = call({"validate", "--tolerance", "0", "--json", "--out",
                       (dir_ / "points.csv").string()});
  EXPECT_EQ(r.code, kExitFailure);
  const auto j = json::parse(r.out);
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_GT(j["points"].get<int>(), 0);
  EXPECT_TRUE(fs::exists(dir_ / "points.csv"));
  EXPECT_EQ(call({"validate", "--protocol", "random", "--runs", "3", "--tolerance", "100"}).code,
            kExitOk);
}

TEST(Seeds, ReplicationSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (int r = 0; r < 1000; ++r) seen.insert(replication_seed(42, r));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(replication_seed(42, 3), replication_seed(42, 3));
}

TEST(Hash, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

}  // namespace
}  // namespace swarmkit::cli
