#pragma once

// Withdrawal ledger hardened against replay with a per-account nonce, a
// validity window and a consumed-transaction set; plus the plain ledger.

#include <chainlab/common.hpp>
#include <chainlab/errors.hpp>
#include <chainlab/primitives.hpp>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace chainlab {

enum class ReplayFault { ZeroAmount, InsufficientBalance, Expired, BadNonce, AlreadyUsed };

using ReplayRejected = Rejected<ReplayFault>;

struct WithdrawRequest {
  AccountId account;
  Amount amount = 0;
  std::uint64_t nonce = 0;
  std::uint64_t timestamp = 0;

  friend bool operator==(const WithdrawRequest&, const WithdrawRequest&) = default;

  [[nodiscard]] Digest256 tx_hash() const {
    FieldEncoder enc;
    enc.add_text(account.name)
        .add_uint(static_cast<std::uint64_t>(amount))
        .add_uint(nonce)
        .add_uint(timestamp);
    return enc.hash();
  }
};

class ReplayLedger {
 public:
  static constexpr std::uint64_t kDefaultTimeValid = 300;

  explicit ReplayLedger(std::uint64_t time_valid = kDefaultTimeValid) : time_valid_(time_valid) {}

  void deposit(const AccountId& account, Amount amount) {
    if (amount <= 0) throw ReplayRejected(ReplayFault::ZeroAmount, "Amount must more than 0!");
    balances_[account] += amount;
  }

  /// Checks run in the contract's order: balance, window, nonce, used hash.
  void withdraw_guarded(const WithdrawRequest& req, std::uint64_t now) {
    if (req.amount <= 0) throw ReplayRejected(ReplayFault::ZeroAmount, "Amount must more than 0!");
    if (balance(req.account) < req.amount) {
      throw ReplayRejected(ReplayFault::InsufficientBalance, "No enough money in account !");
    }
    if (now > req.timestamp + time_valid_) {
      throw ReplayRejected(ReplayFault::Expired, "The time is overed !");
    }
    const auto tx = req.tx_hash();
    if (nonce(req.account) != req.nonce) {
      throw ReplayRejected(ReplayFault::BadNonce, "Invalid nonce !");
    }
    if (used_.contains(tx)) {
      throw ReplayRejected(ReplayFault::AlreadyUsed, "Transaction already used !");
    }

    ++nonces_[req.account];
    balances_[req.account] -= req.amount;
    last_time_[req.account] = now;
    used_.insert(tx);
  }

  [[nodiscard]] Amount balance(const AccountId& a) const {
    auto it = balances_.find(a);
    return it == balances_.end() ? 0 : it->second;
  }

  /// Next expected nonce.
  [[nodiscard]] std::uint64_t nonce(const AccountId& a) const {
    auto it = nonces_.find(a);
    return it == nonces_.end() ? 0 : it->second;
  }

  /// Informational only; nothing reads it back.
  [[nodiscard]] std::uint64_t last_time(const AccountId& a) const {
    auto it = last_time_.find(a);
    return it == last_time_.end() ? 0 : it->second;
  }

  [[nodiscard]] bool used(const Digest256& tx) const { return used_.contains(tx); }
  [[nodiscard]] std::size_t used_count() const { return used_.size(); }
  [[nodiscard]] std::uint64_t time_valid() const { return time_valid_; }

 private:
  std::uint64_t time_valid_;
  std::map<AccountId, Amount> balances_;
  std::map<AccountId, std::uint64_t> nonces_;
  std::map<AccountId, std::uint64_t> last_time_;
  std::unordered_set<Digest256, Digest256Hasher> used_;
};

/// Balance-only ledger; an identical withdrawal can be applied again.
class VulnerableBank {
 public:
  void deposit(const AccountId& account, Amount amount) {
    if (amount <= 0) throw ReplayRejected(ReplayFault::ZeroAmount, "Amount must more than 0 !");
    balances_[account] += amount;
  }

  void withdraw(const AccountId& account, Amount amount) {
    if (balance(account) < amount) {
      throw ReplayRejected(ReplayFault::InsufficientBalance, "No enough money in account");
    }
    balances_[account] -= amount;
  }

  [[nodiscard]] Amount balance(const AccountId& a) const {
    auto it = balances_.find(a);
    return it == balances_.end() ? 0 : it->second;
  }

 private:
  std::map<AccountId, Amount> balances_;
};

}  // namespace chainlab
