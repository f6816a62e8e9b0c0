#include <gtest/gtest.h>

#include "cli.hpp"

using namespace monadlab;
using cli::ExperimentConfig;

namespace {

std::string usage_message(const ExperimentConfig& c) {
  try {
    cli::validate(c);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

ExperimentConfig verify_config() {
  return cli::config_from_json(
      {{"command", "verify"}, {"verbal", "Fbij"}, {"operad", "terminal:Fbij"}, {"monad", "dist"}, {"carrier_sizes", {2}}});
}

}  // namespace

TEST(Config, RoundTrips) {
  auto c = verify_config();
  c.pool = {"0", "1", "1/2"};
  c.seed = 7;
  auto back = cli::config_from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Config, UnknownFieldsAndBadTypesAreListed) {
  try {
    cli::config_from_json({{"command", "verify"}, {"colour", "red"}, {"bound", "three"}, {"prime", 1}});
    FAIL();
  } catch (const UsageError& e) {
    std::string m = e.what();
    EXPECT_NE(m.find("colour: unknown field"), std::string::npos);
    EXPECT_NE(m.find("bound: expected an integer"), std::string::npos);
    EXPECT_NE(m.find("prime: expected a boolean"), std::string::npos);
  }
}

TEST(Config, UnknownMonadIsAUsageError) {
  auto c = verify_config();
  c.command = "check-monad";
  c.monad = "foo";
  std::string m = usage_message(c);
  EXPECT_NE(m.find("monad: "), std::string::npos);
  EXPECT_NE(m.find("foo"), std::string::npos);
}

TEST(Config, FieldDiagnostics) {
  ExperimentConfig c;
  c.command = "verify";
  c.bound = 0;
  c.carrier_sizes = {-1};
  c.mode = "fast";
  c.samples = 0;
  c.verbal = "Fnope";
  c.pool = {"x"};
  std::string m = usage_message(c);
  for (const auto& f : {"bound:", "carrier_sizes:", "mode:", "samples:", "verbal:", "pool:", "operad: required",
                        "monad: required"})
    EXPECT_NE(m.find(f), std::string::npos) << f << "\n" << m;
  EXPECT_EQ(usage_message(verify_config()), "");
}

TEST(Config, PoolMustSuitTheMonad) {
  auto c = verify_config();
  c.pool = {"0"};
  EXPECT_NE(usage_message(c).find("pool: no entry is usable by dist"), std::string::npos);
  c.pool = {"0", "1/2"};
  EXPECT_EQ(usage_message(c), "");
}

TEST(Config, UnknownSuiteAndCommand) {
  ExperimentConfig c;
  c.command = "suite";
  c.suite = "everything";
  EXPECT_NE(usage_message(c).find("suite: unknown suite"), std::string::npos);
  c.command = "prove";
  EXPECT_NE(usage_message(c).find("command: unknown command"), std::string::npos);
}

TEST(Config, SampledModeListsNothing) {
  auto c = verify_config();
  EXPECT_GT(cli::sampling(c).explicit_cap, 0u);
  c.mode = "sampled";
  EXPECT_EQ(cli::sampling(c).explicit_cap, 0u);
}

TEST(Run, VerifyPassesAllFourAxioms) {
  auto res = cli::run(verify_config());
  EXPECT_EQ(res.exit_code, 0) << res.report.dump();
  const auto& top = res.report["report"];
  ASSERT_EQ(top["children"].size(), 1u);
  std::set<std::string> seen;
  for (const auto& c : top["children"][0]["children"]) {
    seen.insert(c["check"].get<std::string>());
    // dist is infinite, so an honest pass is the sampled label
    EXPECT_EQ(c["verdict"], "no counterexample found (sampled)") << c.dump();
    EXPECT_EQ(c["failed"], 0) << c.dump();
    EXPECT_GT(c["checked"].get<int>(), 0) << c.dump();
  }
  for (const auto& a : {"eta-S", "mu-S", "eta-T", "mu-T"}) EXPECT_TRUE(seen.count(a)) << a;
  EXPECT_EQ(res.report["tool"], "monadlab");
  EXPECT_EQ(res.report["config"], verify_config().to_json());
}

TEST(Run, ReplayingTheEchoIsBitForBit) {
  auto c = verify_config();
  c.mode = "sampled";
  c.samples = 40;
  c.seed = 99;
  auto first = cli::run(c);
  auto again = cli::run(cli::config_from_document(first.report));
  EXPECT_EQ(first.report["report"].dump(), again.report["report"].dump());
  EXPECT_EQ(first.report["config"], again.report["config"]);
}

TEST(Run, DiagnosisOfDistributionsOverPowerset) {
  ExperimentConfig c;
  c.command = "diagnose";
  c.s = "dist";
  c.monad = "pfin";
  auto res = cli::run(c);
  EXPECT_EQ(res.exit_code, 0);
  const auto& d = res.report["report"]["children"][0]["details"];
  EXPECT_TRUE(d["intersection"].empty());
  EXPECT_EQ(d["suggestion"], "refine dist at Fbij");
}

TEST(Run, CounterexampleExitCode) {
  ExperimentConfig c;
  c.command = "verify";
  c.verbal = "Fid";
  c.operad = "terminal:Fid";
  c.monad = "list";
  EXPECT_EQ(cli::run(c).exit_code, 1);
}

TEST(Run, RefusalExitCode) {
  ExperimentConfig c;
  c.command = "synth";
  c.verbal = "Finj";
  c.operad = "extend:terminal:Fbij:Finj";
  c.monad = "pfin";
  auto res = cli::run(c);
  EXPECT_EQ(res.exit_code, 2);
  EXPECT_EQ(res.report["verdict"], "refused");
}

TEST(Run, PrettyTableMentionsEveryCheck) {
  auto res = cli::run(verify_config());
  std::string t = cli::render_pretty(res.report);
  for (const auto& a : {"eta-S", "mu-S", "eta-T", "mu-T", "well-definedness"}) EXPECT_NE(t.find(a), std::string::npos);
}
