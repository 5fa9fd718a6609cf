#include <chainlab/escrow.hpp>

#include <gtest/gtest.h>

#include "support/escrow_search.hpp"

#include <random>

using namespace chainlab;
using namespace chainlab::testing;

namespace {

const AccountId kOther{"mallory"};

template <typename Fn>
EscrowFault fault_of(Fn&& fn) {
  try {
    fn();
  } catch (const EscrowRejected& e) {
    return e.reason();
  }
  ADD_FAILURE() << "expected a rejection";
  return EscrowFault::ContractFunds;
}

GuardedEscrow funded(EscrowConfig cfg = {}) {
  GuardedEscrow e(kAdmin, cfg);
  e.fund(kPayer, units(5));
  return e;
}

}  // namespace

TEST(GuardedEscrow, PayCreatesTbcRecord) {
  auto e = funded();
  const auto rec = e.pay(kPayer, units(1), {46, 1000});
  EXPECT_EQ(rec.status, PaymentStatus::TBC);
  EXPECT_EQ(rec.block_number, 46u);
  EXPECT_EQ(rec.pay_hash, payment_hash(kPayer, units(1), 46, 1000));
  EXPECT_EQ(e.record(kPayer), rec);
  EXPECT_EQ(e.max_tbc(), 99);
  EXPECT_EQ(e.wallet(kPayer), units(4));
  EXPECT_EQ(e.escrowed(kPayer), units(1));
}

TEST(GuardedEscrow, PayRejections) {
  auto e = funded();
  EXPECT_EQ(fault_of([&] { e.pay(kPayer, 0, {1, 1}); }), EscrowFault::ZeroAmount);
  EXPECT_EQ(fault_of([&] { e.pay(kPayer, units(6), {1, 1}); }), EscrowFault::InsufficientFunds);
  e.pay(kPayer, units(1), {1, 1});
  try {
    e.pay(kPayer, units(1), {2, 2});
    FAIL();
  } catch (const EscrowRejected& ex) {
    EXPECT_EQ(ex.reason(), EscrowFault::PendingPayment);
    EXPECT_STREQ(ex.what(), "Your last payment does not be confined or refund !");
  }

  GuardedEscrow one(kAdmin, {24, 1});
  one.fund(kPayer, units(1));
  one.fund(kOther, units(1));
  one.pay(kPayer, units(1), {1, 1});
  EXPECT_EQ(fault_of([&] { one.pay(kOther, units(1), {2, 2}); }), EscrowFault::NoSlot);
}

TEST(GuardedEscrow, ConfirmDepthBoundary) {
  auto e = funded();
  e.pay(kPayer, units(1), {46, 1000});
  try {
    e.confirm(kAdmin, kPayer, {46 + 23, 1100});
    FAIL();
  } catch (const EscrowRejected& ex) {
    EXPECT_EQ(ex.reason(), EscrowFault::Premature);
    EXPECT_STREQ(ex.what(), "Payment don't be confirmed by network !");
  }
  EXPECT_EQ(e.record(kPayer).status, PaymentStatus::TBC);

  const auto done = e.confirm(kAdmin, kPayer, {46 + 24, 1200});
  EXPECT_EQ(done.status, PaymentStatus::Confirmed);
  EXPECT_EQ(done.amount, units(1));
  EXPECT_EQ(e.record(kPayer).status, PaymentStatus::None);
  EXPECT_EQ(e.record(kPayer).amount, 0);
  EXPECT_EQ(e.max_tbc(), 100);
  EXPECT_EQ(e.confirmed_outflow(kPayer), units(1));

  EXPECT_EQ(fault_of([&] { e.refund(kAdmin, kPayer); }), EscrowFault::NoMoney);
  EXPECT_EQ(fault_of([&] { e.confirm(kAdmin, kPayer, {200, 2000}); }), EscrowFault::NoMoney);
}

TEST(GuardedEscrow, TamperedRecordFailsHashCheck) {
  auto e = funded();
  auto rec = e.pay(kPayer, units(1), {10, 100});
  rec.amount = units(3);
  e.overwrite_record(kPayer, rec);
  try {
    e.confirm(kAdmin, kPayer, {40, 200});
    FAIL();
  } catch (const EscrowRejected& ex) {
    EXPECT_EQ(ex.reason(), EscrowFault::HashMismatch);
    EXPECT_STREQ(ex.what(), "Payment hash mismatch!");
  }
}

TEST(GuardedEscrow, AdminOnly) {
  auto e = funded();
  e.pay(kPayer, units(1), {1, 1});
  try {
    e.confirm(kOther, kPayer, {100, 100});
    FAIL();
  } catch (const EscrowRejected& ex) {
    EXPECT_EQ(ex.reason(), EscrowFault::NotAdmin);
    EXPECT_STREQ(ex.what(), "Only owner can call this !");
  }
  EXPECT_EQ(fault_of([&] { e.refund(kPayer, kPayer); }), EscrowFault::NotAdmin);
  EXPECT_EQ(e.record(kPayer).status, PaymentStatus::TBC);
}

TEST(GuardedEscrow, RefundRoundTripAndNewPayment) {
  auto e = funded();
  e.pay(kPayer, units(2), {1, 1});
  const auto r = e.refund(kAdmin, kPayer);
  EXPECT_EQ(r.status, PaymentStatus::Refunded);
  EXPECT_EQ(e.wallet(kPayer), units(5));
  EXPECT_EQ(e.max_tbc(), 100);
  try {
    e.refund(kAdmin, kPayer);
    FAIL();
  } catch (const EscrowRejected& ex) {
    EXPECT_EQ(ex.reason(), EscrowFault::WrongStatus);
    EXPECT_STREQ(ex.what(), "The payment can't refund !");
  }
  EXPECT_EQ(fault_of([&] { e.confirm(kAdmin, kPayer, {100, 100}); }), EscrowFault::WrongStatus);
  EXPECT_NO_THROW(e.pay(kPayer, units(1), {2, 2}));
  EXPECT_EQ(e.record(kPayer).status, PaymentStatus::TBC);
}

TEST(GuardedEscrow, ReentrantRefundIsBlockedAndRolledBack) {
  auto e = funded();
  e.pay(kPayer, units(1), {1, 1});
  int attempts = 0;
  std::string inner;
  e.set_refund_hook([&](GuardedEscrow& self, const AccountId& to) {
    ++attempts;
    try {
      self.refund(kAdmin, to);
    } catch (const Revert& ex) {
      inner = ex.what();
      throw;
    }
  });
  try {
    e.refund(kAdmin, kPayer);
    FAIL();
  } catch (const EscrowRejected& ex) {
    EXPECT_EQ(ex.reason(), EscrowFault::RefundFailed);
    EXPECT_STREQ(ex.what(), "Refund failed !");
  }
  EXPECT_EQ(attempts, 1);
  EXPECT_EQ(inner, "DynamicMutex is Locked !");
  EXPECT_EQ(e.record(kPayer).status, PaymentStatus::TBC);
  EXPECT_EQ(e.wallet(kPayer), units(4));
  EXPECT_EQ(e.max_tbc(), 99);
  EXPECT_FALSE(e.guard().any_held());

  // A hook that only observes lets the refund through.
  e.set_refund_hook([](GuardedEscrow&, const AccountId&) {});
  EXPECT_NO_THROW(e.refund(kAdmin, kPayer));
  EXPECT_EQ(e.wallet(kPayer), units(5));
}

// Random operation sequences over several payers: slot accounting and
// per-payer value conservation hold after every step.
TEST(GuardedEscrow, InvariantsUnderRandomSequences) {
  std::mt19937_64 rng(2024);
  const std::vector<AccountId> payers{AccountId("a"), AccountId("b"), AccountId("c")};
  for (int trial = 0; trial < 200; ++trial) {
    GuardedEscrow e(kAdmin, {1 + rng() % 5, static_cast<std::int64_t>(1 + rng() % 3)});
    for (const auto& p : payers) e.fund(p, units(10));
    const auto slots = e.max_tbc();
    std::uint64_t height = 0;
    for (int step = 0; step < 40; ++step) {
      const auto& p = payers[rng() % payers.size()];
      const Amount amount = static_cast<Amount>(rng() % 3) * 500;
      const auto caller = rng() % 8 == 0 ? kOther : kAdmin;
      try {
        switch (rng() % 4) {
          case 0: e.pay(p, amount, {height + 1, height}); break;
          case 1: e.confirm(caller, p, {height + 1, height}); break;
          case 2: e.refund(caller, p); break;
          default: break;
        }
        ++height;
      } catch (const EscrowRejected&) {
      }
      ASSERT_EQ(e.max_tbc() + e.pending_count(), slots);
      for (const auto& q : payers) {
        ASSERT_EQ(e.wallet(q) + e.escrowed(q) + e.confirmed_outflow(q), units(10));
        const auto rec = e.record(q);
        ASSERT_EQ(e.escrowed(q), rec.status == PaymentStatus::TBC ? rec.amount : 0);
        if (rec.status != PaymentStatus::None) {
          ASSERT_EQ(rec.pay_hash, payment_hash(q, rec.amount, rec.block_number, rec.timestamp));
        }
      }
    }
  }
}

TEST(VulnerableEscrow, ListingTraceDoubleSpends) {
  VulnerableEscrow v(kAdmin);
  v.fund(kPayer, units(5));
  v.pay(kPayer, units(1));
  v.pay(kPayer, units(1));
  EXPECT_EQ(v.balance(kPayer), units(2));
  v.confirm(kAdmin, kPayer, units(1));
  v.refund(kAdmin, kPayer, units(1));
  // One unit delivered and one returned, from a payer who is down nothing
  // but the delivered unit: the refund spent funds the confirm already used.
  EXPECT_EQ(v.confirmed_outflow(kPayer), units(1));
  EXPECT_EQ(v.wallet(kPayer), units(4));
  EXPECT_EQ(v.contract_balance(), units(1));
}

TEST(VulnerableEscrow, Rejections) {
  VulnerableEscrow v(kAdmin);
  v.fund(kPayer, units(1));
  EXPECT_EQ(fault_of([&] { v.pay(kPayer, 0); }), EscrowFault::ZeroAmount);
  v.pay(kPayer, units(1));
  try {
    v.confirm(kAdmin, kPayer, units(2));
    FAIL();
  } catch (const EscrowRejected& ex) {
    EXPECT_STREQ(ex.what(), "No enough money !");
  }
  EXPECT_EQ(fault_of([&] { v.refund(kAdmin, kPayer, units(2)); }), EscrowFault::ContractFunds);
  v.confirm(kAdmin, kPayer, units(1));
  EXPECT_EQ(fault_of([&] { v.refund(kAdmin, kPayer, units(1)); }), EscrowFault::InsufficientFunds);
  EXPECT_EQ(fault_of([&] { v.confirm(kOther, kPayer, 1); }), EscrowFault::NotAdmin);
}

namespace {

std::string guarded_invariants(const World<GuardedEscrow>& w, std::int64_t slots) {
  const auto& e = w.ledger;
  if (e.max_tbc() + e.pending_count() != slots) return "slot accounting broken";
  if (e.wallet(kPayer) + e.escrowed(kPayer) + e.confirmed_outflow(kPayer) != 5 * kUnit) {
    return "payer value not conserved";
  }
  return {};
}

}  // namespace

TEST(EscrowSearch, GuardedHasNoDoubleSpend) {
  for (std::uint64_t depth : {1u, 2u, 3u, 24u}) {
    const auto start = guarded_world(depth);
    const auto slots = start.ledger.max_tbc();
    const auto r = search<GuardedEscrow>(start, 6, depth, [&](const World<GuardedEscrow>& w) {
      return guarded_invariants(w, slots);
    });
    EXPECT_EQ(r.traces, 19531u);  // 1 + 5 + ... + 5^6
    EXPECT_EQ(r.double_spends, 0u) << "depth " << depth;
    EXPECT_TRUE(r.invariant_failure.empty()) << r.invariant_failure;
  }
}

TEST(EscrowSearch, VulnerableDoubleSpendsAndWitnessReplays) {
  for (std::uint64_t depth : {2u, 24u}) {
    const auto r = search<VulnerableEscrow>(vulnerable_world(), 6, depth);
    EXPECT_GT(r.double_spends, 0u);
    ASSERT_FALSE(r.witness.empty());

    World<VulnerableEscrow> w = vulnerable_world();
    for (auto op : r.witness) apply(w, op, depth);
    EXPECT_TRUE(w.acct.double_spent());
  }
}

TEST(EscrowSearch, DeliveryThenReorgIsTheVulnerableWitness) {
  World<VulnerableEscrow> v = vulnerable_world();
  EXPECT_TRUE(apply(v, EscrowOp::Pay, 24));
  EXPECT_TRUE(apply(v, EscrowOp::Confirm, 24));
  EXPECT_TRUE(apply(v, EscrowOp::Respend, 24));
  EXPECT_TRUE(v.acct.double_spent());

  World<GuardedEscrow> g = guarded_world(2);
  EXPECT_TRUE(apply(g, EscrowOp::Pay, 2));
  EXPECT_FALSE(apply(g, EscrowOp::Confirm, 2));
  EXPECT_TRUE(apply(g, EscrowOp::Mine, 2));
  EXPECT_TRUE(apply(g, EscrowOp::Confirm, 2));
  EXPECT_FALSE(apply(g, EscrowOp::Respend, 2));
  EXPECT_FALSE(g.acct.double_spent());
}
