#pragma once

// Payment escrow with a per-payer status machine, a network confirmation
// depth and a pending-payment throttle, next to the plain balance ledger it
// replaces.

#include <chainlab/common.hpp>
#include <chainlab/errors.hpp>
#include <chainlab/primitives.hpp>
#include <chainlab/vm_reentrancy.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>

namespace chainlab {

enum class PaymentStatus { None, TBC, Confirmed, Refunded };

inline std::string to_string(PaymentStatus s) {
  switch (s) {
    case PaymentStatus::None: return "None";
    case PaymentStatus::TBC: return "TBC";
    case PaymentStatus::Confirmed: return "Confirmed";
    case PaymentStatus::Refunded: return "Refunded";
  }
  return "?";
}

enum class EscrowFault {
  ZeroAmount,
  PendingPayment,
  NoSlot,
  InsufficientFunds,
  NotAdmin,
  NoMoney,
  WrongStatus,
  Premature,
  HashMismatch,
  RefundFailed,
  ContractFunds,
};

using EscrowRejected = Rejected<EscrowFault>;

/// Where a transaction lands: the height of its block and that block's time.
struct ChainPoint {
  std::uint64_t height = 0;
  std::uint64_t timestamp = 0;
};

inline Digest256 payment_hash(const AccountId& payer, Amount amount, std::uint64_t block_number,
                              std::uint64_t timestamp) {
  FieldEncoder enc;
  enc.add_text(payer.name)
      .add_uint(static_cast<std::uint64_t>(amount))
      .add_uint(block_number)
      .add_uint(timestamp);
  return enc.hash();
}

struct PaymentRecord {
  Amount amount = 0;
  std::uint64_t block_number = 0;
  PaymentStatus status = PaymentStatus::None;
  std::uint64_t timestamp = 0;
  Digest256 pay_hash;

  friend bool operator==(const PaymentRecord&, const PaymentRecord&) = default;
};

struct EscrowConfig {
  std::uint64_t confirm_depth = 24;
  std::int64_t max_tbc = 100;

  void validate() const {
    if (confirm_depth < 1) throw std::invalid_argument("confirm_depth must be >= 1");
    if (max_tbc < 1) throw std::invalid_argument("max_tbc must be >= 1");
  }
};

class GuardedEscrow {
 public:
  /// Invoked when a refund transfers value back to the payer; may call back
  /// into the escrow.
  using RefundHook = std::function<void(GuardedEscrow&, const AccountId&)>;

  explicit GuardedEscrow(AccountId admin, EscrowConfig cfg = {})
      : admin_(std::move(admin)), cfg_(cfg) {
    cfg_.validate();
    state_.max_tbc = cfg_.max_tbc;
  }

  void fund(const AccountId& account, Amount amount) { state_.wallets[account] += amount; }

  void set_refund_hook(RefundHook hook) { refund_hook_ = std::move(hook); }

  PaymentRecord pay(const AccountId& payer, Amount amount, ChainPoint at) {
    if (amount <= 0) throw EscrowRejected(EscrowFault::ZeroAmount, "Amount must more than 0");
    const auto status = record(payer).status;
    if (status != PaymentStatus::None && status != PaymentStatus::Refunded) {
      throw EscrowRejected(EscrowFault::PendingPayment,
                           "Your last payment does not be confined or refund !");
    }
    if (state_.max_tbc <= 0) {
      throw EscrowRejected(EscrowFault::NoSlot, "No pending payment slot available");
    }
    auto& wallet = state_.wallets[payer];
    if (wallet < amount) throw EscrowRejected(EscrowFault::InsufficientFunds, "Insufficient funds");

    wallet -= amount;
    state_.escrowed[payer] += amount;
    PaymentRecord rec{amount, at.height, PaymentStatus::TBC, at.timestamp,
                      payment_hash(payer, amount, at.height, at.timestamp)};
    state_.records[payer] = rec;
    --state_.max_tbc;
    return rec;
  }

  /// Returns the record as it stood at the moment of confirmation (status
  /// Confirmed); the stored record is then cleared back to None.
  PaymentRecord confirm(const AccountId& caller, const AccountId& payer, ChainPoint at) {
    require_admin(caller);
    auto rec = record(payer);
    if (rec.amount <= 0) throw EscrowRejected(EscrowFault::NoMoney, "No money !");
    if (rec.status != PaymentStatus::TBC) {
      throw EscrowRejected(EscrowFault::WrongStatus, "The payment don't need to confirm !");
    }
    if (at.height < rec.block_number + cfg_.confirm_depth) {
      throw EscrowRejected(EscrowFault::Premature, "Payment don't be confirmed by network !");
    }
    if (rec.pay_hash != payment_hash(payer, rec.amount, rec.block_number, rec.timestamp)) {
      throw EscrowRejected(EscrowFault::HashMismatch, "Payment hash mismatch!");
    }

    rec.status = PaymentStatus::Confirmed;
    ++state_.max_tbc;
    state_.escrowed[payer] -= rec.amount;
    state_.confirmed_outflow[payer] += rec.amount;
    state_.records.erase(payer);
    return rec;
  }

  /// Refund of a pending payment. The status flips before value moves, and
  /// the payer is locked for the duration of the transfer.
  PaymentRecord refund(const AccountId& caller, const AccountId& payer) {
    require_admin(caller);
    const State snapshot = state_;
    try {
      ScopedDynamicLock lock(guard_, payer);
      auto& rec = state_.records[payer];
      if (rec.amount <= 0) throw EscrowRejected(EscrowFault::NoMoney, "No money to refund");
      if (rec.status != PaymentStatus::TBC) {
        throw EscrowRejected(EscrowFault::WrongStatus, "The payment can't refund !");
      }
      rec.status = PaymentStatus::Refunded;
      ++state_.max_tbc;
      state_.escrowed[payer] -= rec.amount;
      state_.wallets[payer] += rec.amount;
      const PaymentRecord out = rec;
      if (refund_hook_) {
        try {
          refund_hook_(*this, payer);
        } catch (const Revert&) {
          throw EscrowRejected(EscrowFault::RefundFailed, "Refund failed !");
        }
      }
      return out;
    } catch (const Revert&) {
      state_ = snapshot;
      throw;
    }
  }

  [[nodiscard]] PaymentRecord record(const AccountId& payer) const {
    auto it = state_.records.find(payer);
    return it == state_.records.end() ? PaymentRecord{} : it->second;
  }

  /// Test hook: replaces the stored record verbatim, e.g. to tamper with it.
  void overwrite_record(const AccountId& payer, const PaymentRecord& rec) {
    state_.records[payer] = rec;
  }

  [[nodiscard]] Amount wallet(const AccountId& a) const { return lookup(state_.wallets, a); }
  [[nodiscard]] Amount escrowed(const AccountId& a) const { return lookup(state_.escrowed, a); }
  [[nodiscard]] Amount confirmed_outflow(const AccountId& a) const {
    return lookup(state_.confirmed_outflow, a);
  }
  [[nodiscard]] std::int64_t max_tbc() const { return state_.max_tbc; }
  [[nodiscard]] const AccountId& admin() const { return admin_; }
  [[nodiscard]] const EscrowConfig& config() const { return cfg_; }
  [[nodiscard]] const GuardState& guard() const { return guard_; }

  [[nodiscard]] std::int64_t pending_count() const {
    std::int64_t n = 0;
    for (const auto& [payer, rec] : state_.records) n += rec.status == PaymentStatus::TBC;
    return n;
  }

 private:
  struct State {
    std::map<AccountId, PaymentRecord> records;
    std::map<AccountId, Amount> wallets;
    std::map<AccountId, Amount> escrowed;
    std::map<AccountId, Amount> confirmed_outflow;
    std::int64_t max_tbc = 0;
  };

  static Amount lookup(const std::map<AccountId, Amount>& m, const AccountId& a) {
    auto it = m.find(a);
    return it == m.end() ? 0 : it->second;
  }

  void require_admin(const AccountId& caller) const {
    if (caller != admin_) throw EscrowRejected(EscrowFault::NotAdmin, "Only owner can call this !");
  }

  AccountId admin_;
  EscrowConfig cfg_;
  State state_;
  GuardState guard_;
  RefundHook refund_hook_;
};

/// Plain ledger: payments accumulate into a per-buyer balance that the owner
/// can confirm or refund against, with no status or depth checks.
class VulnerableEscrow {
 public:
  explicit VulnerableEscrow(AccountId owner) : owner_(std::move(owner)) {}

  void fund(const AccountId& account, Amount amount) { wallets_[account] += amount; }

  void pay(const AccountId& payer, Amount amount) {
    if (amount <= 0) throw EscrowRejected(EscrowFault::ZeroAmount, "Amount must more than 0");
    auto& wallet = wallets_[payer];
    if (wallet < amount) throw EscrowRejected(EscrowFault::InsufficientFunds, "Insufficient funds");
    wallet -= amount;
    balances_[payer] += amount;
    contract_balance_ += amount;
  }

  void confirm(const AccountId& caller, const AccountId& buyer, Amount amount) {
    require_owner(caller);
    auto& bal = balances_[buyer];
    if (bal < amount) throw EscrowRejected(EscrowFault::InsufficientFunds, "No enough money !");
    bal -= amount;
    confirmed_outflow_[buyer] += amount;
  }

  void refund(const AccountId& caller, const AccountId& to, Amount amount) {
    require_owner(caller);
    if (contract_balance_ < amount) {
      throw EscrowRejected(EscrowFault::ContractFunds, "Don't have enough money in contract !");
    }
    auto& bal = balances_[to];
    if (bal < amount) {
      throw EscrowRejected(EscrowFault::InsufficientFunds, "Don't have enough money in account !");
    }
    bal -= amount;
    contract_balance_ -= amount;
    wallets_[to] += amount;
  }

  [[nodiscard]] Amount balance(const AccountId& a) const { return lookup(balances_, a); }
  [[nodiscard]] Amount wallet(const AccountId& a) const { return lookup(wallets_, a); }
  [[nodiscard]] Amount confirmed_outflow(const AccountId& a) const {
    return lookup(confirmed_outflow_, a);
  }
  [[nodiscard]] Amount contract_balance() const { return contract_balance_; }
  [[nodiscard]] const AccountId& owner() const { return owner_; }

 private:
  static Amount lookup(const std::map<AccountId, Amount>& m, const AccountId& a) {
    auto it = m.find(a);
    return it == m.end() ? 0 : it->second;
  }

  void require_owner(const AccountId& caller) const {
    if (caller != owner_) throw EscrowRejected(EscrowFault::NotAdmin, "Only owner can call this !");
  }

  AccountId owner_;
  std::map<AccountId, Amount> balances_;
  std::map<AccountId, Amount> wallets_;
  std::map<AccountId, Amount> confirmed_outflow_;
  Amount contract_balance_ = 0;
};

}  // namespace chainlab
