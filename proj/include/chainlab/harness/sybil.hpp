#pragma once

// Sybil script: one adversary controls the opposing identities and votes
// down a valid request. The plain tally counts identities; the reputation
// round weighs supporters by reputation.

#include <chainlab/consensus_rep.hpp>
#include <chainlab/harness/params.hpp>
#include <chainlab/harness/report.hpp>

#include <random>
#include <string>
#include <vector>

namespace chainlab::harness {

inline Params sybil_defaults() {
  return {{"nodes", 5},    {"supporters", 2}, {"initial_reputation", 100},
          {"reward", 10},  {"penalty", 10},   {"removal_floor", 50}};
}

inline ScenarioReport run_sybil(const Scenario& scenario, bool reputation) {
  ParamSet p(scenario.name, sybil_defaults(), scenario.params);
  const auto n = p.get_u("nodes", 1, 1000);
  const auto supporters = p.get_u("supporters", 0, static_cast<std::int64_t>(n));

  ScenarioReport report;
  report.scenario = {scenario.name, scenario.seed, p.values()};

  std::mt19937_64 rng(scenario.seed);
  std::vector<MinerId> ids;
  for (std::uint64_t i = 0; i < n; ++i) ids.push_back(MinerId{KeyPair::generate(rng).public_key});
  auto supports = [&](std::size_t i) { return i < supporters; };
  const auto opposers = n - supporters;

  if (!reputation) {
    PlainVoting tally;
    for (std::size_t i = 0; i < ids.size(); ++i) tally.vote(ids[i], supports(i));
    report.add("Voting", "vote(elector)", "Success",
               {{"supporting_identities", supporters}, {"opposing_identities", opposers}});
    report.add("Tally", "getTicketNumber", "--",
               {{"tickets_for", tally.tickets(true)}, {"tickets_against", tally.tickets(false)}});
    const bool accepted = tally.accepted();
    report.add("Consensus Result", "majority", accepted ? "Successful" : "Failed", {});
    report.verdict = accepted ? Verdict::AttackBlocked : Verdict::AttackSucceeded;
    report.summary = {{"accepted", accepted}};
    return report;
  }

  ReputationConfig cfg;
  cfg.initial_reputation = p.get("initial_reputation", 1, 1'000'000'000);
  cfg.reward = p.get("reward", 0, 1'000'000'000);
  cfg.penalty = p.get("penalty", 0, 1'000'000'000);
  cfg.removal_floor = p.get("removal_floor", 0, 1'000'000'000);
  ReputationConsensus engine(ids, cfg);

  report.add("Initial State", "query nodes", "--",
             {{"nodes", n},
              {"initial_reputation", cfg.initial_reputation},
              {"total_reputation", engine.total_reputation()}});

  const std::string payload = "Transaction";
  const Bytes payload_bytes(payload.begin(), payload.end());
  engine.request(payload_bytes, 1);
  for (std::size_t i = 0; i < ids.size(); ++i) engine.vote(ids[i], supports(i));
  const auto before = engine.nodes();
  const auto out = engine.run_precommit(hash(payload));

  std::int64_t max_delta = 0;
  for (auto d : out.deltas) max_delta = std::max(max_delta, d < 0 ? -d : d);
  report.add("Pre-Commit Phase", "preCommit(hash(Transaction))", out.accepted ? "Successful" : "Failed",
             {{"reputation_change", max_delta},
              {"supporting_nodes", supporters},
              {"opposing_nodes", opposers},
              {"supporter_reputation", out.supporter_sum},
              {"threshold", format_significant(out.threshold)},
              {"removed", out.removed.size()}});

  Json commit = Json::object();
  Json post = Json::object();
  if (out.accepted) {
    const auto& after = engine.nodes();
    std::int64_t honest_change = 0, malicious_change = 0, honest_rep = 0, malicious_rep = 0;
    for (std::size_t i = 0; i < after.size(); ++i) {
      const auto change = after[i].reputation - before[i].reputation - out.deltas[i];
      (supports(i) ? honest_change : malicious_change) = change;
      (supports(i) ? honest_rep : malicious_rep) = after[i].reputation;
    }
    commit = {{"honest_change", honest_change}, {"malicious_change", malicious_change}};
    post = {{"honest_reputation", honest_rep},
            {"malicious_reputation", malicious_rep},
            {"total_reputation", engine.total_reputation()}};
  }
  report.add("Commit Phase", "commit", out.accepted ? "Success" : "Skipped", commit);
  report.add("Post-Commit State", "query nodes", "--", post);

  report.verdict = out.accepted ? Verdict::AttackBlocked : Verdict::AttackSucceeded;
  report.summary = {{"accepted", out.accepted}, {"total_reputation", engine.total_reputation()}};
  return report;
}

}  // namespace chainlab::harness
