#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "kbeta/cli.hpp"
#include "kbeta/types.hpp"

using namespace kbeta;
using Json = nlohmann::json;

namespace {

struct CliRun {
  int rc;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int rc = run_cli(args, out, err);
  return {rc, out.str(), err.str()};
}

std::vector<Json> ndjson(const std::string& text) {
  std::vector<Json> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(Json::parse(line));
  }
  return lines;
}

class SeedEnv : public ::testing::Test {
 protected:
  void SetUp() override { unsetenv("KBETA_SEED"); }
  void TearDown() override { unsetenv("KBETA_SEED"); }
};

}  // namespace

TEST(ParseNumberList, Accepts) {
  EXPECT_EQ(parse_number_list("1"), std::vector<double>{1.0});
  EXPECT_EQ(parse_number_list(" 1.5, 2e-1 ,+3"), (std::vector<double>{1.5, 0.2, 3.0}));
}

TEST(ParseNumberList, RejectsMalformed) {
  for (const char* s : {"", "1,", ",1", "1,,2", "abc", "1x", "1 2", "0x10"}) {
    EXPECT_THROW(parse_number_list(s), ConfigError) << s;
  }
}

TEST(Eval, GammaK) {
  const CliRun r = run({"eval", "gamma_k", "--phi", "5", "--k", "1", "--format", "json"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["function"], "gamma_k");
  EXPECT_NEAR(j["value"].get<double>(), 24.0, 1e-12);
  EXPECT_TRUE(j["evals"].is_null());
}

TEST(Eval, HypergeometricAndTable) {
  const CliRun r = run({"eval", "hyp1f1k", "--a", "1", "--b", "2", "--l", "1", "--k", "1"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("1.718281828"), std::string::npos);
  EXPECT_NE(r.out.find("evals     -"), std::string::npos);
}

TEST(Eval, FirstKind) {
  const CliRun r = run({"eval", "beta_first", "--phi", "2,2", "--k", "1", "--a", "1",
                     "--b", "2", "--eta", "1", "--zeta", "0.5", "--format", "json"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const Json j = Json::parse(r.out);
  const double v = j["value"].get<double>();
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0 / 6.0);
}

TEST(Eval, Errors) {
  EXPECT_EQ(run({"eval", "gamma_k", "--phi", "-1", "--k", "1"}).rc, 2);
  EXPECT_EQ(run({"eval", "gamma_k", "--phi", "nan", "--k", "1"}).rc, 2);
  EXPECT_EQ(run({"eval", "gamma_k", "--phi", "1x", "--k", "1"}).rc, 2);
  EXPECT_EQ(run({"eval", "nope"}).rc, 2);
  EXPECT_EQ(run({"eval", "gamma_k", "--bogus", "1"}).rc, 2);
  EXPECT_EQ(run({"eval", "gamma_k", "--phi", "1", "--tol", "1"}).rc, 2);
  const CliRun r = run({"eval", "gamma_k", "--phi", "-1", "--k", "1"});
  EXPECT_FALSE(r.err.empty());
  EXPECT_TRUE(r.out.empty());
}

TEST(Help, ExitsZero) {
  EXPECT_EQ(run({"--help"}).rc, 0);
  EXPECT_EQ(run({"verify", "--help"}).rc, 0);
}

TEST(List, JsonCoversFunctionsAndTheorems) {
  const CliRun r = run({"list", "--format", "json"});
  ASSERT_EQ(r.rc, 0);
  const Json j = Json::parse(r.out);
  bool fn = false, th = false;
  for (const Json& e : j) {
    if (e["id"] == "beta_first") fn = e["kind"] == "function";
    if (e["id"] == "eq6.14") th = e["kind"] == "theorem";
  }
  EXPECT_TRUE(fn);
  EXPECT_TRUE(th);
}

TEST_F(SeedEnv, VerifyWritesValidNdjson) {
  const CliRun r = run({"verify", "eq4.1", "--trials", "3"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const std::vector<Json> lines = ndjson(r.out);
  ASSERT_EQ(lines.size(), 4u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(lines[i]["theorem"], "eq4.1");
    EXPECT_EQ(lines[i]["verdict"], "pass");
    EXPECT_TRUE(lines[i]["params"].contains("psi"));
    EXPECT_FALSE(lines[i]["links"].empty());
  }
  const Json& agg = lines[3]["aggregate"];
  EXPECT_EQ(agg["trials"], 3);
  EXPECT_EQ(agg["verdict"], "pass");
}

TEST_F(SeedEnv, RepeatedRunsAreByteIdentical) {
  const std::vector<std::string> args{"verify", "eq4.5", "--trials", "4", "--seed", "7"};
  EXPECT_EQ(run(args).out, run(args).out);
  const std::vector<std::string> t{"verify", "eq6.2", "--trials", "3", "--format", "table"};
  EXPECT_EQ(run(t).out, run(t).out);
}

TEST_F(SeedEnv, SeedFromEnvironment) {
  const std::vector<std::string> args{"verify", "eq4.1", "--trials", "2"};
  const std::string dflt = run(args).out;
  setenv("KBETA_SEED", "42", 1);
  EXPECT_EQ(run(args).out, dflt);
  setenv("KBETA_SEED", "43", 1);
  EXPECT_NE(run(args).out, dflt);
  const std::vector<std::string> explicit_seed{"verify", "eq4.1", "--trials", "2", "--seed",
                                               "42"};
  EXPECT_EQ(run(explicit_seed).out, dflt);
  setenv("KBETA_SEED", "x", 1);
  EXPECT_EQ(run(args).rc, 2);
}

TEST_F(SeedEnv, MutationExitsOne) {
  const CliRun r = run({"verify", "eq4.1", "--trials", "3", "--mutate"});
  EXPECT_EQ(r.rc, 1);
  EXPECT_EQ(ndjson(r.out).back()["aggregate"]["verdict"], "fail");
}

TEST_F(SeedEnv, VerifyConfigErrors) {
  EXPECT_EQ(run({"verify", "all", "--slack", "-1"}).rc, 2);
  EXPECT_EQ(run({"verify", "eq9.9"}).rc, 2);
  EXPECT_EQ(run({"verify", "eq4.8", "--k", "2", "--phi-range", "0.2,1"}).rc, 2);
  EXPECT_EQ(run({"verify", "all", "--n", "7"}).rc, 2);
}

TEST_F(SeedEnv, OutputFile) {
  const std::string path = ::testing::TempDir() + "kbeta_report.json";
  const CliRun r = run({"verify", "eq4.11", "--trials", "2", "--output", path});
  ASSERT_EQ(r.rc, 0) << r.err;
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ndjson(ss.str()).size(), 3u);
  std::remove(path.c_str());
}

TEST_F(SeedEnv, TableReport) {
  const CliRun r = run({"verify", "eq4.8", "--trials", "2", "--format", "table"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("verdict: pass"), std::string::npos);
}

TEST(ReportWriters, EmptyReport) {
  SuiteReport rep;
  std::ostringstream js, tb;
  write_report_json(rep, js);
  const std::vector<Json> lines = ndjson(js.str());
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0]["aggregate"]["trials"], 0);
  write_report_table(rep, tb);
  EXPECT_FALSE(tb.str().empty());
}
