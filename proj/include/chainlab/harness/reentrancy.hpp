#pragma once

// Reentrancy script: the bank holds other customers' deposits, the attacker
// contract deposits a small claim and withdraws it, re-entering from its
// receive hook while the bank still looks solvent.

#include <chainlab/harness/params.hpp>
#include <chainlab/harness/report.hpp>
#include <chainlab/vm_reentrancy.hpp>

#include <string>

namespace chainlab::harness {

inline Params reentrancy_defaults() {
  return {{"prefund_milli", 10000},  {"attacker_deposit_milli", 1000},
          {"trigger_milli", 1000},   {"max_reentries", 1000},
          {"propagate_failure", 0},  {"required_level", 0},
          {"max_call_depth", 64}};
}

inline ScenarioReport run_reentrancy(const Scenario& scenario, BankKind kind) {
  ParamSet p(scenario.name, reentrancy_defaults(), scenario.params);
  const Amount prefund = p.get("prefund_milli", 0, 1'000'000'000'000);
  const Amount deposit = p.get("attacker_deposit_milli", 1, 1'000'000'000'000);
  const Amount trigger = p.get("trigger_milli", 1, 1'000'000'000'000);

  ScenarioReport report;
  report.scenario = {scenario.name, scenario.seed, p.values()};

  const AccountId customer("customer");
  const AccountId attacker("attack_contract");
  const std::string bank_name = kind == BankKind::Vulnerable ? "VBank" : "IBank";

  Vm vm(kind, AccountId(bank_name), p.get_u("max_call_depth", 1, 100000));
  vm.set_required_level("withdraw", p.get_u("required_level", 0, 1'000'000));
  ReentrancyAttacker contract(attacker, trigger, p.get_u("max_reentries", 0, 1'000'000),
                              p.get("propagate_failure", 0, 1) != 0);
  contract.install(vm);

  if (prefund > 0) {
    vm.credit(customer, prefund);
    vm.call({customer, vm.bank_id(), prefund, 0}, BankEntry::Deposit);
  }
  report.add("Initial State", "query balance", "--",
             {{"bank_balance", format_amount(vm.bank().vault)}});

  vm.credit(attacker, deposit);
  const auto dep = vm.call({attacker, vm.bank_id(), deposit, 0}, BankEntry::Deposit);
  report.add("Deposit Attack", "deposit " + format_amount(deposit), dep.ok ? "Success" : "Failed",
             {{"bank_balance", format_amount(vm.bank().vault)}});

  const auto wd = vm.call({attacker, vm.bank_id(), 0, 0}, BankEntry::Withdraw);
  Json obs = {{"bank_balance", format_amount(vm.bank().vault)},
              {"reentries", contract.log().reentries}};
  if (!wd.ok) obs["error"] = wd.reason;
  // The attacker's view of its re-entrant withdraw: the first rejected
  // inner call, if any.
  for (const auto& inner : contract.log().inner_results) {
    if (inner.ok) continue;
    obs["reentry_status"] = "withdraw failed !";
    obs["reentry_reason"] = inner.reason;
    break;
  }
  report.add("Withdrawal Attack", "full withdrawal", wd.ok ? "Success" : "Failed", obs);

  const Amount attacker_wallet = vm.wallet(attacker);
  report.add("Final State", "query balance", "--",
             {{"bank_balance", format_amount(vm.bank().vault)},
              {"attacker_balance", format_amount(attacker_wallet)},
              {"attacker_net", format_amount(attacker_wallet - deposit)},
              {"locks_held", vm.guard().any_held()}});

  report.verdict = attacker_wallet > deposit ? Verdict::AttackSucceeded : Verdict::AttackBlocked;
  report.summary = {{"bank_loss", format_amount(prefund + deposit - vm.bank().vault)},
                    {"attacker_net", format_amount(attacker_wallet - deposit)}};
  return report;
}

}  // namespace chainlab::harness
