#pragma once

// Betting game with two randomness sources: a pure function of the block
// timestamp, and a hybrid of chain data with an admin-keyed request ID.
// Also the timestamp-grinding attacker.

#include <chainlab/common.hpp>
#include <chainlab/errors.hpp>
#include <chainlab/primitives.hpp>

#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace chainlab {

enum class GameVariant { Vulnerable, Hybrid };

inline std::string to_string(GameVariant v) { return v == GameVariant::Vulnerable ? "vulnerable" : "hybrid"; }

enum class LotteryFault { BetTooSmall, Insolvent };

using LotteryRejected = Rejected<LotteryFault>;

struct LotteryConfig {
  Amount min_bet = 100;
  std::uint64_t odds_modulus = 10;
  Amount payout_multiplier = 2;
  Digest256 key_hash;
  std::uint64_t admin_number = 0;

  void validate() const {
    if (odds_modulus < 2) throw std::invalid_argument("odds_modulus must be >= 2");
    if (payout_multiplier < 1) throw std::invalid_argument("payout_multiplier must be >= 1");
    if (min_bet < 0) throw std::invalid_argument("min_bet must be non-negative");
  }
};

/// Chain data visible to a transaction: the previous block's hash and the
/// timestamp and difficulty of the block it lands in.
struct ChainContext {
  Digest256 prev_block_hash;
  std::uint64_t timestamp = 0;
  std::uint64_t difficulty = 1;
};

/// hash(timestamp); anyone can evaluate it ahead of time.
inline Digest256 random_vulnerable(std::uint64_t timestamp) {
  FieldEncoder enc;
  enc.add_uint(timestamp);
  return enc.hash();
}

struct RandomRequest {
  Digest256 key_hash;
  std::uint64_t admin_number = 0;
  std::uint64_t timestamp = 0;
  AccountId player;

  [[nodiscard]] Digest256 request_id() const {
    FieldEncoder enc;
    enc.add_digest(key_hash).add_uint(admin_number).add_uint(timestamp).add_text(player.name);
    return enc.hash();
  }
};

inline Digest256 random_hybrid(const Digest256& prev_block_hash, std::uint64_t timestamp,
                               std::uint64_t difficulty, const RandomRequest& request) {
  FieldEncoder enc;
  enc.add_digest(prev_block_hash)
      .add_uint(timestamp)
      .add_uint(difficulty)
      .add_digest(request.request_id());
  return enc.hash();
}

inline bool is_winning(const Digest256& random, std::uint64_t odds_modulus) {
  return random.mod(odds_modulus) == 0;
}

struct BetOutcome {
  AccountId player;
  Amount bet = 0;
  bool won = false;
  Amount payout = 0;
  Amount player_net = 0;
  Digest256 random;
  Amount vault_after = 0;
};

class LotteryGame {
 public:
  LotteryGame(GameVariant variant, LotteryConfig cfg, Amount vault)
      : variant_(variant), cfg_(cfg), vault_(vault) {
    cfg_.validate();
  }

  /// The bet must strictly exceed min_bet, and the vault must be able to
  /// cover a win before the bet is taken.
  BetOutcome play(const AccountId& player, Amount bet, const ChainContext& ctx) {
    if (bet <= cfg_.min_bet) {
      throw LotteryRejected(LotteryFault::BetTooSmall,
                            variant_ == GameVariant::Vulnerable ? "Bet more money!" : "Bet more money !");
    }
    if (vault_ < bet * cfg_.payout_multiplier) {
      throw LotteryRejected(LotteryFault::Insolvent, "Transfer failed!");
    }

    BetOutcome out;
    out.player = player;
    out.bet = bet;
    out.random = draw(player, ctx);
    out.won = is_winning(out.random, cfg_.odds_modulus);
    vault_ += bet;
    if (out.won) {
      out.payout = bet * cfg_.payout_multiplier;
      vault_ -= out.payout;
    }
    out.player_net = out.payout - bet;
    out.vault_after = vault_;
    return out;
  }

  [[nodiscard]] Digest256 draw(const AccountId& player, const ChainContext& ctx) const {
    if (variant_ == GameVariant::Vulnerable) return random_vulnerable(ctx.timestamp);
    RandomRequest req{cfg_.key_hash, cfg_.admin_number, ctx.timestamp, player};
    return random_hybrid(ctx.prev_block_hash, ctx.timestamp, ctx.difficulty, req);
  }

  [[nodiscard]] GameVariant variant() const { return variant_; }
  [[nodiscard]] const LotteryConfig& config() const { return cfg_; }
  [[nodiscard]] Amount vault() const { return vault_; }

 private:
  GameVariant variant_;
  LotteryConfig cfg_;
  Amount vault_;
};

/// What the grinding attacker needs from the chain: the context its next
/// transaction would see, a way to push time forward one second and seal an
/// empty block, and a way to seal the block carrying its bet.
template <typename T>
concept TimeController = requires(T t) {
  { t.pending_context() } -> std::convertible_to<ChainContext>;
  t.advance_second_and_mine();
  t.commit_tx_block();
};

struct GrindReport {
  bool played = false;
  bool won = false;
  std::uint64_t steps = 0;  // filler blocks mined while searching
  std::optional<BetOutcome> outcome;
  std::string failure;
};

/// Advance time one second at a time until the public timestamp RNG
/// predicts a win, then bet. The prediction is exact against the vulnerable
/// game and uninformative against the hybrid one.
template <TimeController Controller>
GrindReport grind_attack(const AccountId& attacker, LotteryGame& game, Controller& chain,
                         std::uint64_t max_steps, Amount bet) {
  GrindReport report;
  const auto odds = game.config().odds_modulus;
  for (std::uint64_t step = 0; step < max_steps; ++step) {
    const ChainContext ctx = chain.pending_context();
    if (is_winning(random_vulnerable(ctx.timestamp), odds)) {
      report.outcome = game.play(attacker, bet, ctx);
      chain.commit_tx_block();
      report.played = true;
      report.won = report.outcome->won;
      report.steps = step;
      return report;
    }
    chain.advance_second_and_mine();
  }
  report.steps = max_steps;
  report.failure = "no predicted winning timestamp within max_steps";
  return report;
}

}  // namespace chainlab
