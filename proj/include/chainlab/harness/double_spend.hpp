#pragma once

// Double-spend script: pay, pay again before confirmation, confirm early,
// mine the confirmation depth, confirm, then try to claw the money back.
// The same script runs against both ledgers.

#include <chainlab/escrow.hpp>
#include <chainlab/harness/params.hpp>
#include <chainlab/harness/report.hpp>
#include <chainlab/harness/sim.hpp>

#include <functional>
#include <random>
#include <string>

namespace chainlab::harness {

inline Params double_spend_defaults() {
  return {{"start_height", 45}, {"start_time", 1000},  {"payment_milli", 1000},
          {"wallet_milli", 5000}, {"confirm_depth", 24}, {"max_tbc", 100}};
}

namespace detail {

/// Sends a transaction: on success the next block is sealed and its height
/// reported; on a revert nothing is mined and the reason is reported.
inline bool send_tx(SimChain& chain, ScenarioReport& report, const std::string& step,
                    const std::string& action, const std::function<void(ChainPoint)>& tx) {
  chain.advance_time(1);
  const auto at = chain.next_point();
  try {
    tx(at);
  } catch (const Revert& e) {
    report.add(step, action, "Failed", {{"error", std::string("Revert ") + e.what()}});
    return false;
  }
  chain.mine_filler();
  report.add(step, action, "Success", {{"block", at.height}});
  return true;
}

inline void generate_blocks(SimChain& chain, ScenarioReport& report, std::uint64_t count) {
  const auto from = chain.clock().height + 1;
  for (std::uint64_t k = 0; k < count; ++k) chain.advance_second_and_mine();
  // The short transactions sent to drive mining all revert; only empty
  // blocks are produced.
  report.add("Block Generation", "cyclic short transactions", "Failed",
             {{"empty_blocks", count}, {"from_block", from}, {"to_block", chain.clock().height}});
}

}  // namespace detail

inline ScenarioReport run_double_spend(const Scenario& scenario, bool guarded) {
  ParamSet p(scenario.name, double_spend_defaults(), scenario.params);
  const auto start_height = p.get_u("start_height", 0, 1'000'000'000);
  const auto start_time = p.get_u("start_time", 0, 1'000'000'000'000);
  const Amount payment = p.get("payment_milli", 1, 1'000'000'000'000);
  const Amount wallet = p.get("wallet_milli", 0, 1'000'000'000'000);
  EscrowConfig cfg;
  cfg.confirm_depth = p.get_u("confirm_depth", 1, 1'000'000);
  cfg.max_tbc = p.get("max_tbc", 1, 1'000'000);

  ScenarioReport report;
  report.scenario = {scenario.name, scenario.seed, p.values()};

  std::mt19937_64 rng(scenario.seed);
  SimChain chain(rng, start_height, start_time);
  const AccountId admin("admin");
  const AccountId payer("attacker");

  bool duplicate_ok = false;
  bool early_confirm_ok = false;
  bool refund_ok = false;

  if (guarded) {
    GuardedEscrow bank(admin, cfg);
    bank.fund(payer, wallet);
    detail::send_tx(chain, report, "Initial Payment", "HBank.pay()",
                    [&](ChainPoint at) { bank.pay(payer, payment, at); });
    duplicate_ok = detail::send_tx(chain, report, "Duplicate Payment", "HBank.pay()",
                                   [&](ChainPoint at) { bank.pay(payer, payment, at); });
    early_confirm_ok =
        detail::send_tx(chain, report, "Initial Confirmation", "confirmPayment(attacker)",
                        [&](ChainPoint at) { bank.confirm(admin, payer, at); });
    detail::generate_blocks(chain, report, cfg.confirm_depth);
    detail::send_tx(chain, report, "Final Confirmation", "confirmPayment(attacker)",
                    [&](ChainPoint at) { bank.confirm(admin, payer, at); });
    refund_ok = detail::send_tx(chain, report, "Refund Attempt", "refund(attacker)",
                                [&](ChainPoint) { bank.refund(admin, payer); });
    const auto rec = bank.record(payer);
    report.add("Final State", "query payment", "--",
               {{"status", to_string(rec.status)},
                {"amount", format_amount(rec.amount)},
                {"wallet", format_amount(bank.wallet(payer))},
                {"confirmed_outflow", format_amount(bank.confirmed_outflow(payer))},
                {"max_tbc", bank.max_tbc()}});
  } else {
    VulnerableEscrow bank(admin);
    bank.fund(payer, wallet);
    detail::send_tx(chain, report, "Initial Payment", "VBank.pay()",
                    [&](ChainPoint) { bank.pay(payer, payment); });
    duplicate_ok = detail::send_tx(chain, report, "Duplicate Payment", "VBank.pay()",
                                   [&](ChainPoint) { bank.pay(payer, payment); });
    early_confirm_ok =
        detail::send_tx(chain, report, "Initial Confirmation", "confirmPayment(attacker, amount)",
                        [&](ChainPoint) { bank.confirm(admin, payer, payment); });
    detail::generate_blocks(chain, report, cfg.confirm_depth);
    detail::send_tx(chain, report, "Final Confirmation", "confirmPayment(attacker, amount)",
                    [&](ChainPoint) { bank.confirm(admin, payer, payment); });
    refund_ok = detail::send_tx(chain, report, "Refund Attempt", "refund(attacker, amount)",
                                [&](ChainPoint) { bank.refund(admin, payer, payment); });
    report.add("Final State", "query balance", "--",
               {{"ledger_balance", format_amount(bank.balance(payer))},
                {"wallet", format_amount(bank.wallet(payer))},
                {"confirmed_outflow", format_amount(bank.confirmed_outflow(payer))},
                {"contract_balance", format_amount(bank.contract_balance())}});
  }

  report.verdict = duplicate_ok || early_confirm_ok || refund_ok ? Verdict::AttackSucceeded
                                                                 : Verdict::AttackBlocked;
  report.summary = {{"duplicate_accepted", duplicate_ok},
                    {"premature_confirm_accepted", early_confirm_ok},
                    {"refund_after_confirm_accepted", refund_ok}};
  return report;
}

}  // namespace chainlab::harness
