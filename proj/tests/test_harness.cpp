#include <chainlab/harness.hpp>

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace chainlab;
using namespace chainlab::harness;

namespace {

ScenarioReport run_named(const std::string& name, Params params = {}, std::uint64_t seed = 42) {
  return run(Scenario{name, seed, std::move(params)});
}

const ReportRow& row(const ScenarioReport& r, const std::string& step) {
  for (const auto& x : r.rows) {
    if (x.step == step) return x;
  }
  throw std::runtime_error("no row " + step);
}

}  // namespace

TEST(Catalog, TwelveScenariosInSixPairs) {
  const auto& all = catalog();
  ASSERT_EQ(all.size(), 12u);
  std::map<std::string, std::set<Verdict>> by_category;
  std::set<std::string> names;
  for (const auto& e : all) {
    by_category[e.category].insert(e.expected);
    names.insert(e.name);
  }
  EXPECT_EQ(names.size(), 12u);
  EXPECT_EQ(by_category.size(), 6u);
  for (const auto& [cat, verdicts] : by_category) EXPECT_EQ(verdicts.size(), 2u) << cat;
  EXPECT_THROW(find_scenario("nope"), ScenarioError);
}

TEST(Catalog, EveryScenarioReachesItsExpectedVerdict) {
  for (const auto& e : catalog()) {
    const auto r = run_named(e.name);
    EXPECT_EQ(r.verdict, e.expected) << e.name;
    EXPECT_EQ(r.scenario.params, e.defaults()) << e.name;
  }
}

TEST(Harness, DeterministicForFixedScenario) {
  for (const auto& e : catalog()) {
    EXPECT_EQ(to_jsonl(run_named(e.name)), to_jsonl(run_named(e.name))) << e.name;
  }
}

TEST(Harness, SeedOnlyChangesKeyDerivedFields) {
  // Balances and verdicts do not depend on keys; the reports still differ
  // where addresses or secrets appear, and at least in the header.
  for (const auto& e : catalog()) {
    const auto a = run_named(e.name, {}, 1);
    const auto b = run_named(e.name, {}, 2);
    EXPECT_NE(to_jsonl(a), to_jsonl(b));
    if (e.category != "time-bandit") {
      EXPECT_EQ(a.verdict, b.verdict) << e.name;
    }
  }
}

TEST(Harness, UnknownParameterRejected) {
  EXPECT_THROW(run_named("replay_guarded", {{"bogus", 1}}), ScenarioError);
  EXPECT_THROW(run_named("sybil_plain", {{"supporters", 99}}), ScenarioError);
}

TEST(Harness, OverridesAreEchoedInTheHeader) {
  const auto r = run_named("replay_guarded", {{"time_valid", 5}});
  EXPECT_EQ(r.scenario.params.at("time_valid"), 5);
  EXPECT_EQ(r.scenario.params.at("deposit_milli"), 5000);
}

TEST(FiftyOne, PlainMainChainIsTheAttackerAfterAttack) {
  const auto r = run_named("fifty_one_plain");
  const auto& after = row(r, "Main Chain After Attack").observables;
  EXPECT_EQ(after.at("main_length").get<int>(), 100);
  EXPECT_EQ(after.at("attacker_on_main").get<int>(), 60);
  EXPECT_EQ(r.verdict, Verdict::AttackSucceeded);
}

TEST(FiftyOne, HwdKeepsHonestBlocksNextToFirstAttackerBlock) {
  const auto r = run_named("fifty_one_hwd");
  const auto& before = row(r, "Main Chain Before Attack").observables;
  const auto& after = row(r, "Main Chain After Attack").observables;
  EXPECT_EQ(before.at("main_length").get<int>(), 30);
  EXPECT_EQ(after.at("honest_on_main").get<int>(), 40);
  EXPECT_EQ(after.at("attacker_on_main").get<int>(), 1);
  const auto tail = after.at("main_tail").get<std::vector<std::string>>();
  const std::vector<std::string> expect{"honest_0@38/d50", "honest_1@39/d50", "attacker@40/d60"};
  EXPECT_EQ(tail, expect);
}

TEST(FiftyOne, ThresholdAboveHistoryFreezesTheSeedBlock) {
  EXPECT_THROW(run_named("fifty_one_hwd", {{"min_block_numbers", 0}}), ScenarioError);
  const auto r = run_named("fifty_one_hwd", {{"min_block_numbers", 101}});
  EXPECT_EQ(row(r, "Main Chain After Attack").observables.at("main_length").get<int>(), 1);
}

TEST(DoubleSpend, GuardedTraceRows) {
  const auto r = run_named("double_spend_guarded");
  std::vector<std::pair<std::string, std::string>> steps;
  for (const auto& x : r.rows) steps.emplace_back(x.step, x.status);
  const std::vector<std::pair<std::string, std::string>> expect{
      {"Initial Payment", "Success"},      {"Duplicate Payment", "Failed"},
      {"Initial Confirmation", "Failed"},  {"Block Generation", "Failed"},
      {"Final Confirmation", "Success"},   {"Refund Attempt", "Failed"},
      {"Final State", "--"}};
  EXPECT_EQ(steps, expect);
  EXPECT_EQ(row(r, "Initial Payment").observables.at("block").get<int>(), 46);
  EXPECT_EQ(row(r, "Final Confirmation").observables.at("block").get<int>(), 71);
  EXPECT_EQ(row(r, "Block Generation").observables.at("empty_blocks").get<int>(), 24);
  EXPECT_EQ(row(r, "Final State").observables.at("status").get<std::string>(), "None");
  EXPECT_EQ(row(r, "Final State").observables.at("amount").get<std::string>(), "0");
}

TEST(DoubleSpend, DepthParameterMovesTheFinalBlock) {
  const auto r = run_named("double_spend_guarded", {{"confirm_depth", 3}});
  EXPECT_EQ(row(r, "Final Confirmation").observables.at("block").get<int>(), 50);
  EXPECT_EQ(r.verdict, Verdict::AttackBlocked);
}

TEST(Reentrancy, ScenarioBalances) {
  const auto v = run_named("reentrancy_vulnerable");
  EXPECT_EQ(v.summary.at("attacker_net").get<std::string>(), "10");
  const auto g = run_named("reentrancy_guarded");
  EXPECT_EQ(g.summary.at("attacker_net").get<std::string>(), "0");
  EXPECT_EQ(g.summary.at("bank_loss").get<std::string>(), "1");
  const auto& w = row(g, "Withdrawal Attack").observables;
  EXPECT_EQ(w.at("reentry_status").get<std::string>(), "withdraw failed !");
}

TEST(Replay, ScenarioBalances) {
  EXPECT_EQ(run_named("replay_vulnerable").summary.at("final_balance").get<std::string>(), "1");
  const auto g = run_named("replay_guarded");
  EXPECT_EQ(g.summary.at("final_balance").get<std::string>(), "3");
  EXPECT_EQ(row(g, "Transaction Replay").status, "Failed");
}

TEST(Replay, ExpiredWindowAlsoBlocks) {
  const auto g = run_named("replay_guarded", {{"time_valid", 10}, {"replay_delay", 50}});
  EXPECT_EQ(row(g, "Transaction Replay").observables.at("error").get<std::string>(),
            "The time is overed !");
  EXPECT_EQ(g.verdict, Verdict::AttackBlocked);
}

TEST(Sybil, CanonicalRound) {
  const auto r = run_named("sybil_reputation");
  const auto& pre = row(r, "Pre-Commit Phase").observables;
  EXPECT_EQ(pre.at("reputation_change").get<int>(), 0);
  EXPECT_EQ(pre.at("supporter_reputation").get<int>(), 200);
  EXPECT_EQ(pre.at("threshold").get<std::string>(), "30");
  EXPECT_EQ(row(r, "Pre-Commit Phase").status, "Successful");
  EXPECT_EQ(row(r, "Post-Commit State").observables.at("total_reputation").get<int>(), 490);
}

TEST(Sybil, NoSupportersMeansRejected) {
  EXPECT_EQ(run_named("sybil_reputation", {{"supporters", 0}}).verdict, Verdict::AttackSucceeded);
  EXPECT_EQ(run_named("sybil_plain", {{"supporters", 3}}).verdict, Verdict::AttackBlocked);
}

TEST(TimeBandit, Summaries) {
  const auto v = run_named("timebandit_vulnerable");
  EXPECT_EQ(v.summary.at("wins").get<int>(), 50);
  const auto g = run_named("timebandit_guarded");
  EXPECT_LE(g.summary.at("wins").get<int>(), 15);
  const auto none = run_named("timebandit_vulnerable", {{"max_steps", 0}, {"trials", 3}});
  EXPECT_EQ(none.summary.at("bets").get<int>(), 0);
  EXPECT_EQ(none.rows.at(0).status, "NoBet");
}

TEST(SimChain, TransactionsLandInTheNextBlock) {
  std::mt19937_64 rng(1);
  SimChain chain(rng, 45, 1000);
  EXPECT_EQ(chain.next_point().height, 46u);
  const auto prev = chain.tip().hash();
  const auto ctx = chain.pending_context();
  EXPECT_EQ(ctx.prev_block_hash, prev);
  EXPECT_EQ(ctx.timestamp, 1000u);
  chain.advance_second_and_mine();
  EXPECT_EQ(chain.clock().height, 46u);
  EXPECT_EQ(chain.clock().now, 1001u);
  EXPECT_NE(chain.pending_context().prev_block_hash, prev);
  EXPECT_TRUE(chain.tip().signature_valid());
  EXPECT_EQ(chain.tip().miner, chain.filler_miner());
  EXPECT_EQ(chain.blocks_sealed(), 1u);
}

TEST(Report, JsonlShapeAndTable) {
  ScenarioReport r;
  r.scenario = {"demo", 7, {{"k", 1}}};
  r.add("Step A", "act", "Success", {{"x", 1}});
  r.verdict = Verdict::AttackSucceeded;
  r.summary = {{"n", 2}};
  const auto text = to_jsonl(r);
  std::vector<Json> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(Json::parse(l));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].at("record"), "scenario");
  EXPECT_EQ(lines[0].at("seed"), 7);
  EXPECT_EQ(lines[1].at("index"), 0);
  EXPECT_EQ(lines[1].at("observables").at("x"), 1);
  EXPECT_EQ(lines[2].at("verdict"), "AttackSucceeded");
  EXPECT_EQ(verdict_from_string("AttackBlocked"), Verdict::AttackBlocked);
  EXPECT_THROW(verdict_from_string("maybe"), std::invalid_argument);

  const auto table = render_table(r);
  EXPECT_NE(table.find("== demo (seed 7)"), std::string::npos);
  EXPECT_NE(table.find("x=1"), std::string::npos);
  EXPECT_NE(table.find("verdict: AttackSucceeded  (n=2)"), std::string::npos);
}
