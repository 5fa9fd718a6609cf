#pragma once

// Majority-hashpower attack: honest miners take turns on the first blocks,
// then a single attacker with higher difficulty mines the rest. The node
// re-runs main-chain selection against its history after every block.

#include <chainlab/chain.hpp>
#include <chainlab/forkchoice.hpp>
#include <chainlab/harness/params.hpp>
#include <chainlab/harness/report.hpp>

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace chainlab::harness {

inline Params fifty_one_defaults() {
  return {{"honest_blocks", 40},      {"attacker_blocks", 60},   {"honest_difficulty", 50},
          {"attacker_difficulty", 60}, {"min_block_numbers", 30}, {"history_window", 100},
          {"honest_miners", 2}};
}

/// Proof-of-work puzzle for the plain variant: a nonce solves difficulty d
/// when hash(nonce) mod d == 0, and each nonce may be spent only once.
class NoncePuzzle {
 public:
  struct Solution {
    std::uint64_t nonce = 0;
    std::uint64_t attempts = 0;
    std::uint64_t reused = 0;  // solutions rejected as "already used"
  };

  static bool solves(std::uint64_t nonce, std::uint64_t difficulty) {
    FieldEncoder enc;
    enc.add_uint(nonce);
    return enc.hash().mod(difficulty) == 0;
  }

  /// Searches upward from the miner's own counter, as each mining loop in the
  /// attack script keeps its own validNonce.
  Solution solve(const MinerId& miner, std::uint64_t difficulty) {
    Solution s;
    auto& next = counters_[miner];
    for (;; ++next) {
      ++s.attempts;
      if (!solves(next, difficulty)) continue;
      if (used_.insert(next).second) {
        s.nonce = next++;
        return s;
      }
      ++s.reused;
    }
  }

 private:
  std::map<MinerId, std::uint64_t> counters_;
  std::set<std::uint64_t> used_;
};

inline ScenarioReport run_fifty_one(const Scenario& scenario, ForkRule rule) {
  ParamSet p(scenario.name, fifty_one_defaults(), scenario.params);
  const auto honest_blocks = p.get_u("honest_blocks", 0, 100000);
  const auto attacker_blocks = p.get_u("attacker_blocks", 0, 100000);
  const auto honest_d = p.get_u("honest_difficulty", 1, 1'000'000);
  const auto attacker_d = p.get_u("attacker_difficulty", 1, 1'000'000);
  const auto miners = p.get_u("honest_miners", 1, 1000);

  ForkChoiceConfig cfg;
  cfg.rule = rule;
  cfg.min_block_numbers = p.get_u("min_block_numbers", 1, 1'000'000'000);

  ScenarioReport report;
  report.scenario = {scenario.name, scenario.seed, p.values()};

  std::mt19937_64 rng(scenario.seed);
  std::vector<KeyPair> honest;
  std::map<MinerId, std::string> label;
  for (std::uint64_t m = 0; m < miners; ++m) {
    honest.push_back(KeyPair::generate(rng));
    label[MinerId{honest.back().public_key}] = "honest_" + std::to_string(m);
  }
  const KeyPair attacker = KeyPair::generate(rng);
  const MinerId attacker_id{attacker.public_key};
  label[attacker_id] = "attacker";

  HistoryWindow window(p.get_u("history_window", 1, 1'000'000));
  Branch history;
  Branch main;
  NoncePuzzle puzzle;
  std::vector<Block> honest_mined;

  const auto total = honest_blocks + attacker_blocks;
  for (std::uint64_t i = 0; i < total; ++i) {
    const bool is_honest = i < honest_blocks;
    const KeyPair& key = is_honest ? honest[i % miners] : attacker;
    const auto difficulty = is_honest ? honest_d : attacker_d;
    const Block block = Block::mine(key, i, difficulty, i);

    Json obs = {{"height", i}, {"miner", label[block.miner]}, {"difficulty", difficulty}};
    if (rule == ForkRule::PlainDifficulty) {
      const auto sol = puzzle.solve(block.miner, difficulty);
      obs["nonce"] = sol.nonce;
      obs["nonce_reused"] = sol.reused;
    }

    append_block(window, history, block);
    if (is_honest) honest_mined.push_back(block);
    const auto decision = update_main_from_history(main, window, cfg);

    obs["main_score"] = format_significant(decision.adopted_challenger ? decision.challenger_score
                                                                       : decision.current_score);
    obs["history_score"] = format_significant(decision.challenger_score);
    obs["main_length"] = main.size();
    report.add(is_honest ? "Honest Mining" : "Attack Mining", "mine block", "Success", obs)
        .observables["main_switched"] = decision.adopted_challenger;

    if (i + 1 == honest_blocks) {
      report.add("Main Chain Before Attack", "query main chain", "--",
                 {{"main_length", main.size()},
                  {"tip_height", main.empty() ? 0 : main.back().height}});
    }
  }

  std::size_t honest_on_main = 0;
  std::size_t attacker_on_main = 0;
  for (const auto& b : main.blocks()) {
    (b.miner == attacker_id ? attacker_on_main : honest_on_main) += 1;
  }
  const bool all_honest_kept = honest_on_main == honest_mined.size();

  Json tail = Json::array();
  const std::size_t show = std::min<std::size_t>(3, main.size());
  for (std::size_t k = main.size() - show; k < main.size(); ++k) {
    const auto& b = main[k];
    tail.push_back(label[b.miner] + "@" + std::to_string(b.height) + "/d" +
                   std::to_string(b.difficulty));
  }
  report.add("Main Chain After Attack", "query main chain", "--",
             {{"main_length", main.size()},
              {"honest_on_main", honest_on_main},
              {"attacker_on_main", attacker_on_main},
              {"main_tail", tail}});

  report.verdict = all_honest_kept && attacker_on_main <= 1 ? Verdict::AttackBlocked
                                                            : Verdict::AttackSucceeded;
  report.summary = {{"rule", to_string(rule)},
                    {"main_length", main.size()},
                    {"honest_on_main", honest_on_main},
                    {"attacker_on_main", attacker_on_main}};
  return report;
}

}  // namespace chainlab::harness
