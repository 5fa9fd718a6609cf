#pragma once

// Replay script: deposit, withdraw, then resubmit the captured withdrawal
// with identical parameters.

#include <chainlab/harness/params.hpp>
#include <chainlab/harness/report.hpp>
#include <chainlab/replayguard.hpp>

namespace chainlab::harness {

inline Params replay_defaults() {
  return {{"deposit_milli", 5000}, {"withdraw_milli", 2000}, {"time_valid", 300},
          {"start_time", 1000},    {"replay_delay", 1}};
}

inline ScenarioReport run_replay(const Scenario& scenario, bool guarded) {
  ParamSet p(scenario.name, replay_defaults(), scenario.params);
  const Amount deposit = p.get("deposit_milli", 1, 1'000'000'000'000);
  const Amount withdraw = p.get("withdraw_milli", 1, 1'000'000'000'000);
  const auto time_valid = p.get_u("time_valid", 0, 1'000'000'000);
  std::uint64_t now = p.get_u("start_time", 0, 1'000'000'000'000);
  const auto delay = p.get_u("replay_delay", 0, 1'000'000'000);

  ScenarioReport report;
  report.scenario = {scenario.name, scenario.seed, p.values()};

  const AccountId victim("victim");
  const std::string bank = guarded ? "Ibank" : "Vbank";
  ReplayLedger hardened(time_valid);
  VulnerableBank plain;
  auto balance = [&] { return guarded ? hardened.balance(victim) : plain.balance(victim); };

  auto attempt = [&](const std::string& step, const std::string& value, auto&& op) {
    try {
      op();
      report.add(step, bank + ".withdraw()", "Success", {{"value", value}});
      return true;
    } catch (const ReplayRejected& e) {
      report.add(step, bank + ".withdraw()", "Failed", {{"value", value}, {"error", e.what()}});
      return false;
    }
  };

  guarded ? hardened.deposit(victim, deposit) : plain.deposit(victim, deposit);
  report.add("Initial Deposit", bank + ".deposit()", "Success",
             {{"value", "deposit " + format_amount(deposit)}});
  report.add("Opening Balance", "check balance", "--", {{"balance", format_amount(balance())}});

  const WithdrawRequest req{victim, withdraw, guarded ? hardened.nonce(victim) : 0, now};
  const auto value = "withdraw " + format_amount(withdraw);
  attempt("Withdrawal Operation", value, [&] {
    guarded ? hardened.withdraw_guarded(req, now) : plain.withdraw(victim, withdraw);
  });
  const Amount after_withdraw = balance();
  report.add("Balance After Withdrawal", "check balance", "--",
             {{"balance", format_amount(after_withdraw)}});

  now += delay;
  const bool replayed = attempt("Transaction Replay", "copy transaction parameters", [&] {
    guarded ? hardened.withdraw_guarded(req, now) : plain.withdraw(victim, withdraw);
  });
  report.add("Final State", "check balance", "--", {{"balance", format_amount(balance())}});

  report.verdict = replayed ? Verdict::AttackSucceeded : Verdict::AttackBlocked;
  report.summary = {{"final_balance", format_amount(balance())}, {"replay_accepted", replayed}};
  return report;
}

}  // namespace chainlab::harness
