#pragma once

// Timestamp-grinding script: before every bet the attacker pushes time and
// mines empty blocks until the public timestamp RNG predicts a win.

#include <chainlab/harness/params.hpp>
#include <chainlab/harness/report.hpp>
#include <chainlab/harness/sim.hpp>
#include <chainlab/lottery_rng.hpp>

#include <random>

namespace chainlab::harness {

inline Params timebandit_defaults() {
  return {{"trials", 50},           {"max_steps", 200},        {"odds", 10},
          {"bet_milli", 1000},      {"min_bet_milli", 100},    {"payout", 2},
          {"vault_milli", 100000},  {"start_time", 1'700'000'000}};
}

/// Wins exceed the binomial mean by more than five standard deviations:
/// w - n/k > 5 * sqrt(n (1/k) (1 - 1/k)), evaluated in integers.
inline bool wins_beyond_five_sigma(std::uint64_t wins, std::uint64_t trials, std::uint64_t odds) {
  const auto excess = static_cast<__int128>(wins) * odds - static_cast<__int128>(trials);
  if (excess <= 0) return false;
  return excess * excess > static_cast<__int128>(25) * trials * (odds - 1);
}

struct GrindStats {
  std::uint64_t trials = 0;
  std::uint64_t plays = 0;
  std::uint64_t wins = 0;
};

/// Runs `trials` grinding attacks back to back on one chain, one second apart.
/// `on_trial` sees each report; pass a no-op when only totals matter.
template <typename OnTrial>
GrindStats run_grind_trials(LotteryGame& game, SimChain& chain, const AccountId& attacker,
                            std::uint64_t trials, std::uint64_t max_steps, Amount bet,
                            OnTrial&& on_trial) {
  GrindStats stats;
  for (std::uint64_t t = 0; t < trials; ++t) {
    GrindReport r;
    try {
      r = grind_attack(attacker, game, chain, max_steps, bet);
    } catch (const LotteryRejected& e) {
      r.failure = e.what();
    }
    ++stats.trials;
    stats.plays += r.played;
    stats.wins += r.won;
    on_trial(t, r);
    chain.advance_second_and_mine();
  }
  return stats;
}

inline ScenarioReport run_timebandit(const Scenario& scenario, GameVariant variant) {
  ParamSet p(scenario.name, timebandit_defaults(), scenario.params);
  const auto trials = p.get_u("trials", 0, 1'000'000);
  const auto max_steps = p.get_u("max_steps", 0, 1'000'000);
  const Amount bet = p.get("bet_milli", 1, 1'000'000'000'000);

  LotteryConfig cfg;
  cfg.odds_modulus = p.get_u("odds", 2, 1'000'000);
  cfg.min_bet = p.get("min_bet_milli", 0, 1'000'000'000'000);
  cfg.payout_multiplier = p.get("payout", 1, 1000);

  ScenarioReport report;
  report.scenario = {scenario.name, scenario.seed, p.values()};

  std::mt19937_64 rng(scenario.seed);
  for (std::size_t i = 0; i < cfg.key_hash.bytes.size(); i += 8) {
    const auto word = rng();
    for (std::size_t j = 0; j < 8; ++j) cfg.key_hash.bytes[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
  }
  cfg.admin_number = rng();
  const Amount initial_vault = p.get("vault_milli", 0, 1'000'000'000'000);
  LotteryGame game(variant, cfg, initial_vault);
  SimChain chain(rng, 0, p.get_u("start_time", 0, 4'000'000'000'000));
  const AccountId attacker("attacker");

  const auto stats = run_grind_trials(
      game, chain, attacker, trials, max_steps, bet, [&](std::uint64_t t, const GrindReport& r) {
        Json obs = {{"steps", r.steps}, {"vault", format_amount(game.vault())}};
        if (r.outcome) {
          obs["timestamp"] = chain.clock().now;
          obs["player_net"] = format_amount(r.outcome->player_net);
        }
        if (!r.failure.empty()) obs["error"] = r.failure;
        const char* status = !r.played ? "NoBet" : (r.won ? "Won" : "Lost");
        report.add("Trial " + std::to_string(t + 1), "grind timestamp + play()", status, obs);
      });

  report.verdict = wins_beyond_five_sigma(stats.wins, stats.trials, cfg.odds_modulus)
                       ? Verdict::AttackSucceeded
                       : Verdict::AttackBlocked;
  report.summary = {{"trials", stats.trials},
                    {"bets", stats.plays},
                    {"wins", stats.wins},
                    {"vault_change", format_amount(game.vault() - initial_vault)}};
  return report;
}

}  // namespace chainlab::harness
