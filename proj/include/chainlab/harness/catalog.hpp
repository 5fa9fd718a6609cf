#pragma once

// The twelve scenarios: six attacks, each against a vulnerable baseline and
// its hardened counterpart, with the verdict each is expected to reach.

#include <chainlab/harness/double_spend.hpp>
#include <chainlab/harness/fifty_one.hpp>
#include <chainlab/harness/reentrancy.hpp>
#include <chainlab/harness/replay.hpp>
#include <chainlab/harness/report.hpp>
#include <chainlab/harness/sybil.hpp>
#include <chainlab/harness/timebandit.hpp>

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace chainlab::harness {

struct CatalogEntry {
  std::string name;
  std::string category;
  std::string description;
  Verdict expected;
  std::function<Params()> defaults;
  std::function<ScenarioReport(const Scenario&)> runner;
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"fifty_one_plain", "51% attack", "majority miner vs accumulated-difficulty fork choice",
       Verdict::AttackSucceeded, fifty_one_defaults,
       [](const Scenario& s) { return run_fifty_one(s, ForkRule::PlainDifficulty); }},
      {"fifty_one_hwd", "51% attack", "majority miner vs historically weighted difficulty",
       Verdict::AttackBlocked, fifty_one_defaults,
       [](const Scenario& s) { return run_fifty_one(s, ForkRule::Hwd); }},
      {"double_spend_vulnerable", "double spending", "repeat payment on a plain balance ledger",
       Verdict::AttackSucceeded, double_spend_defaults,
       [](const Scenario& s) { return run_double_spend(s, false); }},
      {"double_spend_guarded", "double spending", "repeat payment vs status machine + 24-block depth",
       Verdict::AttackBlocked, double_spend_defaults,
       [](const Scenario& s) { return run_double_spend(s, true); }},
      {"reentrancy_vulnerable", "reentrancy", "recursive withdraw against transfer-then-update bank",
       Verdict::AttackSucceeded, reentrancy_defaults,
       [](const Scenario& s) { return run_reentrancy(s, BankKind::Vulnerable); }},
      {"reentrancy_guarded", "reentrancy", "recursive withdraw vs combined dynamic/level mutex",
       Verdict::AttackBlocked, reentrancy_defaults,
       [](const Scenario& s) { return run_reentrancy(s, BankKind::Guarded); }},
      {"replay_vulnerable", "replay", "resubmitted withdrawal on a balance-only ledger",
       Verdict::AttackSucceeded, replay_defaults,
       [](const Scenario& s) { return run_replay(s, false); }},
      {"replay_guarded", "replay", "resubmitted withdrawal vs nonce + validity window",
       Verdict::AttackBlocked, replay_defaults,
       [](const Scenario& s) { return run_replay(s, true); }},
      {"sybil_plain", "sybil", "identity majority in one-identity-one-vote tally",
       Verdict::AttackSucceeded, sybil_defaults,
       [](const Scenario& s) { return run_sybil(s, false); }},
      {"sybil_reputation", "sybil", "identity majority vs reputation-weighted PBFT round",
       Verdict::AttackBlocked, sybil_defaults,
       [](const Scenario& s) { return run_sybil(s, true); }},
      {"timebandit_vulnerable", "time-bandit", "timestamp grinding vs timestamp-only lottery RNG",
       Verdict::AttackSucceeded, timebandit_defaults,
       [](const Scenario& s) { return run_timebandit(s, GameVariant::Vulnerable); }},
      {"timebandit_guarded", "time-bandit", "timestamp grinding vs hybrid request-ID RNG",
       Verdict::AttackBlocked, timebandit_defaults,
       [](const Scenario& s) { return run_timebandit(s, GameVariant::Hybrid); }},
  };
  return entries;
}

inline const CatalogEntry& find_scenario(const std::string& name) {
  const auto& all = catalog();
  auto it = std::find_if(all.begin(), all.end(), [&](const auto& e) { return e.name == name; });
  if (it == all.end()) throw ScenarioError("unknown scenario '" + name + "'");
  return *it;
}

/// Throws ScenarioError for an unknown name or parameter.
inline ScenarioReport run(const Scenario& scenario) {
  return find_scenario(scenario.name).runner(scenario);
}

}  // namespace chainlab::harness
