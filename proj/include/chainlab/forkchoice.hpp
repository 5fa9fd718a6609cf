#pragma once

#include <chainlab/chain.hpp>
#include <chainlab/numeric.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace chainlab {

enum class ForkRule { PlainDifficulty, Hwd };

/// Which difficulty represents a miner that appears several times in a branch.
enum class DifficultyPick { FirstBlock, MaxBlock };

inline std::string to_string(ForkRule rule) {
  return rule == ForkRule::Hwd ? "hwd" : "plain_difficulty";
}

struct ForkChoiceConfig {
  std::uint64_t min_block_numbers = 30;
  ForkRule rule = ForkRule::Hwd;
  DifficultyPick pick = DifficultyPick::FirstBlock;

  void validate() const {
    if (min_block_numbers < 1) throw std::invalid_argument("min_block_numbers must be >= 1");
  }
};

/// Historically weighted difficulty: sum over the branch's distinct miners of
/// (that miner's difficulty) x (its frequency in the global window). Each
/// miner counts once. Branches shorter than min_block_numbers score 0.
inline Rational hwd(const Branch& branch, const HistoryWindow& window,
                    const ForkChoiceConfig& cfg) {
  cfg.validate();
  if (branch.size() < cfg.min_block_numbers) return Rational(0);

  std::map<MinerId, std::uint64_t> difficulty_of;
  std::vector<MinerId> order;
  for (const auto& block : branch.blocks()) {
    auto [it, inserted] = difficulty_of.try_emplace(block.miner, block.difficulty);
    if (inserted) {
      order.push_back(block.miner);
    } else if (cfg.pick == DifficultyPick::MaxBlock) {
      it->second = std::max(it->second, block.difficulty);
    }
  }

  Rational total(0);
  for (const auto& miner : order) {
    total += Rational(static_cast<std::int64_t>(difficulty_of[miner])) *
             miner_frequency(window, miner);
  }
  return total;
}

/// Accumulated difficulty, the longest/heaviest-chain baseline.
inline std::uint64_t plain_weight(const Branch& branch) {
  std::uint64_t sum = 0;
  for (const auto& block : branch.blocks()) sum += block.difficulty;
  return sum;
}

inline Rational branch_score(const Branch& branch, const HistoryWindow& window,
                             const ForkChoiceConfig& cfg) {
  if (cfg.rule == ForkRule::Hwd) return hwd(branch, window, cfg);
  return Rational(static_cast<std::int64_t>(plain_weight(branch)));
}

struct ForkDecision {
  ForkRule rule = ForkRule::Hwd;
  Rational current_score;
  Rational challenger_score;
  bool adopted_challenger = false;
};

struct ForkSelection {
  Branch chosen;
  ForkDecision decision;
};

/// The challenger replaces the current main branch only on a strictly higher
/// score; ties keep the current branch.
inline ForkSelection select_main(const Branch& current, const Branch& challenger,
                                 const HistoryWindow& window, const ForkChoiceConfig& cfg) {
  ForkDecision d;
  d.rule = cfg.rule;
  d.current_score = branch_score(current, window, cfg);
  d.challenger_score = branch_score(challenger, window, cfg);
  d.adopted_challenger = d.current_score < d.challenger_score;
  return {d.adopted_challenger ? challenger : current, d};
}

/// Node-local main-chain maintenance after each mined block: the first block
/// seeds the main chain, afterwards the whole history window challenges it.
inline ForkDecision update_main_from_history(Branch& main, const HistoryWindow& window,
                                             const ForkChoiceConfig& cfg) {
  auto history = window.as_branch();
  if (main.empty()) {
    ForkDecision d;
    d.rule = cfg.rule;
    d.challenger_score = branch_score(history, window, cfg);
    d.adopted_challenger = true;
    main = std::move(history);
    return d;
  }
  auto selection = select_main(main, history, window, cfg);
  if (selection.decision.adopted_challenger) main = std::move(selection.chosen);
  return selection.decision;
}

}  // namespace chainlab
