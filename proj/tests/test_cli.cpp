#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <sstream>

#include "ordist/cli/app.hpp"

using namespace ordist;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  json report;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ordist-cli-" + std::to_string(::getpid()) + "-" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(std::vector<std::string> args, bool cache = true) {
    if (cache) {
      args.push_back("--cache");
      args.push_back(dir_.string());
    } else {
      args.push_back("--no-cache");
    }
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    json report;
    if (!out.str().empty() && out.str()[0] == '{') report = json::parse(out.str());
    return {code, report, err.str()};
  }

  static json without_timing(json j) {
    j.erase("timing_ms");
    return j;
  }

  fs::path dir_;
};

bool has_float(const json& j) {
  if (j.is_number_float()) return true;
  if (j.is_structured())
    for (const auto& x : j)
      if (has_float(x)) return true;
  return false;
}

}  // namespace

TEST_F(CliTest, Field) {
  auto r = run({"field", "-d", "23"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.report["schema"], "ordist.report/1");
  EXPECT_EQ(r.report["status"], "ok");
  EXPECT_EQ(r.report["disc"], -23);
  EXPECT_EQ(r.report["h"], 3);
  EXPECT_EQ(r.report["w"], 2);
  EXPECT_EQ(r.report["command"]["name"], "field");
  EXPECT_FALSE(has_float(r.report));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"bogus"}).code, 1);
  EXPECT_EQ(run({"rayclass", "-d", "7"}).code, 1);
  auto r = run({"field", "-d", "12"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.report["error"]["code"], "NotSquarefree");
  EXPECT_EQ(run({"field", "-d", "7", "--format", "xml"}).code, 1);
}

TEST_F(CliTest, RayClassHitEqualsMiss) {
  auto miss = run({"rayclass", "-d", "7", "-m", "p:7,p:11:0", "--artin-bound", "30"});
  ASSERT_EQ(miss.code, 0);
  EXPECT_EQ(miss.report["group"]["order"], 30);
  EXPECT_TRUE(fs::exists(dir_ / "v1.0.0" / "d7" / "p_7+p_11_0" / "manifest.json"));
  auto hit = run({"rayclass", "-d", "7", "-m", "p:7,p:11:0", "--artin-bound", "30", "-v"});
  EXPECT_NE(hit.err.find("cache hit"), std::string::npos);
  EXPECT_EQ(without_timing(miss.report), without_timing(hit.report));
  auto none = run({"rayclass", "-d", "7", "-m", "p:7,p:11:0", "--artin-bound", "30"}, false);
  EXPECT_EQ(without_timing(miss.report), without_timing(none.report));
  EXPECT_FALSE(has_float(miss.report));
}

TEST_F(CliTest, TorsionHitEqualsMiss) {
  auto miss = run({"torsion", "-d", "3", "-m", "p:7:0,p:13:0"});
  ASSERT_EQ(miss.code, 0) << miss.err;
  EXPECT_EQ(miss.report["torsion_invariants"], json::array());
  EXPECT_EQ(miss.report["rank"], miss.report["top_order"]);
  EXPECT_EQ(miss.report["oracles"]["relation_cokernel"], miss.report["oracles"]["kernel_quotient"]);
  auto hit = run({"torsion", "-d", "3", "-m", "p:7:0,p:13:0", "-v"});
  EXPECT_NE(hit.err.find("cache hit"), std::string::npos);
  EXPECT_EQ(without_timing(miss.report), without_timing(hit.report));
  EXPECT_FALSE(has_float(miss.report));
}

TEST_F(CliTest, CorruptCacheIsRecomputed) {
  auto first = run({"torsion", "-d", "7", "-m", "p:7,p:11:0"});
  ASSERT_EQ(first.code, 0);
  auto dir = dir_ / "v1.0.0" / "d7" / "p_7+p_11_0";
  std::ofstream(dir / "presentation.relations.txt") << "garbage";
  auto again = run({"torsion", "-d", "7", "-m", "p:7,p:11:0", "-v"});
  EXPECT_EQ(again.code, 0);
  EXPECT_EQ(again.err.find("cache hit"), std::string::npos);
  EXPECT_EQ(without_timing(first.report), without_timing(again.report));
}

TEST_F(CliTest, NoCacheWritesNothing) {
  EXPECT_EQ(run({"rayclass", "-d", "7", "-m", "p:11:0"}, false).code, 0);
  EXPECT_FALSE(fs::exists(dir_));
}

TEST_F(CliTest, CertifyTriple) {
  auto r = run({"certify", "-d", "7", "-p", "7", "-p", "p:11:0", "-p", "p:23:0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.report["nu"], 165);
  EXPECT_EQ(r.report["conclusion"], true);
  EXPECT_EQ(r.report["in_kernel"], true);
}

TEST_F(CliTest, CertifyHypothesisFailureExits2) {
  auto r = run({"certify", "-d", "5", "-p", "p:3:0", "-p", "p:7:0", "-p", "p:23:0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.report["status"], "hypothesis_failed");
  EXPECT_EQ(run({"certify", "-d", "7", "-p", "7", "-p", "p:11:0"}).code, 1);
}

TEST_F(CliTest, Search) {
  auto r5 = run({"search", "-d", "5", "--norm-bound", "200"});
  EXPECT_EQ(r5.code, 0);
  EXPECT_EQ(r5.report["count"], 0);
  EXPECT_EQ(r5.report["triples"], json::array());
  auto r7 = run({"search", "-d", "7", "--norm-bound", "25"});
  EXPECT_EQ(r7.code, 0);
  bool found = false;
  for (auto& t : r7.report["triples"]) found = found || t == json::array({"p:7", "p:11:0", "p:23:0"});
  EXPECT_TRUE(found) << r7.report["triples"].dump();
}

TEST_F(CliTest, ToralgSweep) {
  auto r = run({"toralg-sweep", "--ell", "3", "--max-m", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.report["all_hold"], true);
  for (auto& row : r.report["rows"]) {
    EXPECT_EQ(row["torsion_invariants"], row["expected"]);
    EXPECT_EQ(row["verdict"], "ok");
  }
  EXPECT_EQ(run({"toralg-sweep", "--ell", "4"}).code, 1);
}

TEST_F(CliTest, OrderBudget) {
  auto r = run({"rayclass", "-d", "7", "-m", "p:7,p:11:0,p:23:0,p:43:0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.report["error"]["code"], "ModulusTooLarge");
}
