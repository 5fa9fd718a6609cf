#pragma once

// Minimal synchronous call model for the reentrancy experiments. A value
// transfer to a contract account runs that contract's receive hook before the
// transfer returns, so a hook can call back into the bank while the outer
// withdrawal is still in flight.
//
// Rollback: every call snapshots the world on entry and restores it when the
// call reverts. Exceeding max_call_depth aborts the outermost call.

#include <chainlab/common.hpp>
#include <chainlab/errors.hpp>
#include <chainlab/primitives.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace chainlab {

enum class VmFault {
  DepthExceeded,
  MutexLocked,
  LevelLocked,
  NoMoney,
  TransferFailed,
  ZeroAmount,
  InsufficientFunds,
  UnknownEntry,
};

using VmRejected = Rejected<VmFault>;

/// Hierarchical lock width: H_u = hash(account, balance) mod 256.
inline constexpr std::uint64_t kLevelLockModulus = 256;

/// Permit iff the dynamic lock is held by this operation (d == 1) and the
/// account's level reaches the operation's required level.
constexpr bool combined_mutex(int d, std::uint64_t h, std::uint64_t s) {
  return d == 1 && h >= s;
}

inline std::uint64_t level_lock_for(const AccountId& account, Amount balance) {
  FieldEncoder enc;
  enc.add_text(account.name).add_uint(static_cast<std::uint64_t>(balance));
  return enc.hash().mod(kLevelLockModulus);
}

struct GuardState {
  std::map<AccountId, bool> dynamic_mutex;         // D_u
  std::map<AccountId, std::uint64_t> level_lock;   // H_u
  std::map<std::string, std::uint64_t> required_level;  // s per operation

  [[nodiscard]] bool held(const AccountId& a) const {
    auto it = dynamic_mutex.find(a);
    return it != dynamic_mutex.end() && it->second;
  }

  [[nodiscard]] std::uint64_t required(const std::string& op) const {
    auto it = required_level.find(op);
    return it == required_level.end() ? 0 : it->second;
  }

  [[nodiscard]] bool any_held() const {
    for (const auto& [account, locked] : dynamic_mutex) {
      if (locked) return true;
    }
    return false;
  }
};

/// Holds D_u for the lifetime of the scope; throws if it is already held.
class ScopedDynamicLock {
 public:
  ScopedDynamicLock(GuardState& guard, AccountId account)
      : guard_(guard), account_(std::move(account)) {
    if (guard_.held(account_)) {
      throw VmRejected(VmFault::MutexLocked, "DynamicMutex is Locked !");
    }
    guard_.dynamic_mutex[account_] = true;
  }
  ScopedDynamicLock(const ScopedDynamicLock&) = delete;
  ScopedDynamicLock& operator=(const ScopedDynamicLock&) = delete;
  ~ScopedDynamicLock() { guard_.dynamic_mutex[account_] = false; }

 private:
  GuardState& guard_;
  AccountId account_;
};

struct BankState {
  std::map<AccountId, Amount> balances;
  Amount vault = 0;

  [[nodiscard]] Amount balance_of(const AccountId& a) const {
    auto it = balances.find(a);
    return it == balances.end() ? 0 : it->second;
  }

  [[nodiscard]] Amount claims() const {
    Amount sum = 0;
    for (const auto& [a, b] : balances) sum += b;
    return sum;
  }
};

enum class BankKind { Vulnerable, Guarded };
enum class BankEntry { Deposit, Withdraw };

inline std::string to_string(BankEntry e) { return e == BankEntry::Deposit ? "deposit" : "withdraw"; }

struct CallContext {
  AccountId caller;
  AccountId callee;
  Amount value = 0;
  std::size_t depth = 0;
};

struct CallResult {
  bool ok = true;
  std::string reason;
};

struct CallEvent {
  std::size_t depth = 0;
  AccountId caller;
  BankEntry entry = BankEntry::Withdraw;
  bool ok = true;
  std::string reason;
  Amount vault_after = 0;
};

class Vm {
 public:
  using ReceiveHook = std::function<void(Vm&, const CallContext&)>;

  explicit Vm(BankKind kind, AccountId bank = AccountId("bank"), std::size_t max_call_depth = 64)
      : kind_(kind), bank_id_(std::move(bank)), max_call_depth_(max_call_depth) {}

  void credit(const AccountId& account, Amount amount) { world_.wallets[account] += amount; }

  void install_contract(const AccountId& account, ReceiveHook hook) {
    hooks_[account] = std::move(hook);
  }

  void set_required_level(const std::string& op, std::uint64_t level) {
    world_.guard.required_level[op] = level;
  }

  /// Runs `entry` on the bank. A reverting call leaves no trace in the world
  /// state. A nested revert is returned to its caller; exceeding the depth
  /// limit unwinds to the outermost call.
  CallResult call(const CallContext& ctx, BankEntry entry) {
    const World snapshot = world_;
    try {
      if (ctx.depth >= max_call_depth_) {
        throw VmRejected(VmFault::DepthExceeded, "call depth exceeded");
      }
      switch (entry) {
        case BankEntry::Deposit: deposit(ctx); break;
        case BankEntry::Withdraw:
          kind_ == BankKind::Vulnerable ? withdraw_vulnerable(ctx) : withdraw_guarded(ctx);
          break;
      }
      events_.push_back({ctx.depth, ctx.caller, entry, true, "", world_.bank.vault});
      return {true, ""};
    } catch (const VmRejected& e) {
      world_ = snapshot;
      events_.push_back({ctx.depth, ctx.caller, entry, false, e.what(), world_.bank.vault});
      if (e.reason() == VmFault::DepthExceeded && ctx.depth > 0) throw;
      return {false, e.what()};
    }
  }

  [[nodiscard]] const BankState& bank() const { return world_.bank; }
  [[nodiscard]] const GuardState& guard() const { return world_.guard; }
  [[nodiscard]] const AccountId& bank_id() const { return bank_id_; }
  [[nodiscard]] BankKind kind() const { return kind_; }
  [[nodiscard]] std::size_t max_call_depth() const { return max_call_depth_; }
  [[nodiscard]] const std::vector<CallEvent>& events() const { return events_; }

  [[nodiscard]] Amount wallet(const AccountId& a) const {
    auto it = world_.wallets.find(a);
    return it == world_.wallets.end() ? 0 : it->second;
  }

  /// vault + every wallet; constant across any call sequence.
  [[nodiscard]] Amount total_value() const {
    Amount sum = world_.bank.vault;
    for (const auto& [a, v] : world_.wallets) sum += v;
    return sum;
  }

 private:
  struct World {
    BankState bank;
    GuardState guard;
    std::map<AccountId, Amount> wallets;
  };

  void deposit(const CallContext& ctx) {
    if (ctx.value <= 0) throw VmRejected(VmFault::ZeroAmount, "Amount must more than 0 !");
    auto& wallet = world_.wallets[ctx.caller];
    if (wallet < ctx.value) throw VmRejected(VmFault::InsufficientFunds, "Insufficient funds");
    wallet -= ctx.value;
    world_.bank.vault += ctx.value;
    world_.bank.balances[ctx.caller] += ctx.value;
  }

  // Transfer first, zero the balance afterwards.
  void withdraw_vulnerable(const CallContext& ctx) {
    const Amount owed = world_.bank.balance_of(ctx.caller);
    if (owed == 0) return;
    transfer(ctx, ctx.caller, owed);
    world_.bank.balances[ctx.caller] = 0;
  }

  // Lock, zero the balance, then transfer.
  void withdraw_guarded(const CallContext& ctx) {
    ScopedDynamicLock lock(world_.guard, ctx.caller);
    const Amount owed = world_.bank.balance_of(ctx.caller);
    const auto level = level_lock_for(ctx.caller, owed);
    world_.guard.level_lock[ctx.caller] = level;

    if (owed <= 0) throw VmRejected(VmFault::NoMoney, "No money in account !");
    const int d = world_.guard.held(ctx.caller) ? 1 : 0;
    if (!combined_mutex(d, level, world_.guard.required("withdraw"))) {
      throw VmRejected(VmFault::LevelLocked, "Level lock is Locked");
    }
    world_.bank.balances[ctx.caller] = 0;
    transfer(ctx, ctx.caller, owed);
  }

  void transfer(const CallContext& ctx, const AccountId& to, Amount amount) {
    if (world_.bank.vault < amount) {
      throw VmRejected(VmFault::TransferFailed, "withdraw failed !");
    }
    world_.bank.vault -= amount;
    world_.wallets[to] += amount;
    auto hook = hooks_.find(to);
    if (hook == hooks_.end()) return;
    try {
      hook->second(*this, CallContext{bank_id_, to, amount, ctx.depth + 1});
    } catch (const VmRejected& e) {
      if (e.reason() == VmFault::DepthExceeded) throw;
      throw VmRejected(VmFault::TransferFailed, "withdraw failed !");
    }
  }

  BankKind kind_;
  AccountId bank_id_;
  std::size_t max_call_depth_;
  World world_;
  std::map<AccountId, ReceiveHook> hooks_;
  std::vector<CallEvent> events_;
};

/// Attacker contract whose receive hook re-enters `withdraw` while the bank
/// still holds at least `trigger` and fewer than `max_reentries` re-entries
/// have been made. With `propagate_failure` a rejected re-entry reverts the
/// hook, which fails the outer transfer; otherwise the failure is swallowed.
class ReentrancyAttacker {
 public:
  struct Log {
    std::size_t reentries = 0;
    std::vector<CallResult> inner_results;
    std::vector<Amount> balance_seen_in_callback;
  };

  ReentrancyAttacker(AccountId self, Amount trigger, std::size_t max_reentries,
                     bool propagate_failure)
      : self_(std::move(self)),
        trigger_(trigger),
        max_reentries_(max_reentries),
        propagate_(propagate_failure),
        log_(std::make_shared<Log>()) {}

  void install(Vm& vm) const {
    vm.install_contract(self_, [self = self_, trigger = trigger_, limit = max_reentries_,
                                propagate = propagate_, log = log_](Vm& v, const CallContext& ctx) {
      log->balance_seen_in_callback.push_back(v.bank().balance_of(self));
      if (v.bank().vault < trigger || log->reentries >= limit) return;
      ++log->reentries;
      auto result = v.call(CallContext{self, v.bank_id(), 0, ctx.depth + 1}, BankEntry::Withdraw);
      log->inner_results.push_back(result);
      if (!result.ok && propagate) throw VmRejected(VmFault::TransferFailed, result.reason);
    });
  }

  [[nodiscard]] const AccountId& id() const { return self_; }
  [[nodiscard]] const Log& log() const { return *log_; }

 private:
  AccountId self_;
  Amount trigger_;
  std::size_t max_reentries_;
  bool propagate_;
  std::shared_ptr<Log> log_;
};

}  // namespace chainlab
