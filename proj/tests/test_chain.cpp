#include <chainlab/chain.hpp>

#include <gtest/gtest.h>

#include "support/builders.hpp"

#include <map>
#include <random>

using namespace chainlab;
using namespace chainlab::testing;

TEST(Block, SignatureCoversEveryHeaderField) {
  const auto keys = make_keys(2);
  const auto b = Block::mine(keys[0], 7, 50, 1234);
  EXPECT_TRUE(b.signature_valid());

  auto h = b;
  h.height = 8;
  EXPECT_FALSE(h.signature_valid());
  auto d = b;
  d.difficulty = 51;
  EXPECT_FALSE(d.signature_valid());
  auto t = b;
  t.timestamp = 1235;
  EXPECT_FALSE(t.signature_valid());
  auto m = b;
  m.miner = id_of(keys[1]);
  EXPECT_FALSE(m.signature_valid());
}

TEST(AppendBlock, GenesisIntoEmptyWindow) {
  const auto keys = make_keys(1);
  HistoryWindow window;
  Branch branch;
  append_block(window, branch, Block::mine(keys[0], 0, 1, 0));
  EXPECT_EQ(window.size(), 1u);
  EXPECT_EQ(branch.size(), 1u);
}

TEST(AppendBlock, ForgedSignatureRejectedWithoutSideEffects) {
  const auto keys = make_keys(2);
  HistoryWindow window;
  Branch branch;
  append_block(window, branch, Block::mine(keys[0], 0, 1, 0));
  auto forged = Block::mine(keys[1], 1, 1, 1);
  forged.miner = id_of(keys[0]);
  try {
    append_block(window, branch, forged);
    FAIL() << "forged block accepted";
  } catch (const ChainRejected& e) {
    EXPECT_EQ(e.reason(), ChainFault::BadSignature);
  }
  EXPECT_EQ(window.size(), 1u);
  EXPECT_EQ(branch.size(), 1u);
}

TEST(AppendBlock, HeightGapAndTimeRegressionRejected) {
  const auto keys = make_keys(1);
  HistoryWindow window;
  Branch branch;
  append_block(window, branch, Block::mine(keys[0], 0, 1, 100));
  try {
    append_block(window, branch, Block::mine(keys[0], 2, 1, 101));
    FAIL();
  } catch (const ChainRejected& e) {
    EXPECT_EQ(e.reason(), ChainFault::HeightGap);
  }
  try {
    append_block(window, branch, Block::mine(keys[0], 1, 1, 99));
    FAIL();
  } catch (const ChainRejected& e) {
    EXPECT_EQ(e.reason(), ChainFault::TimestampRegression);
  }
  try {
    append_block(window, branch, Block::mine(keys[0], 1, 0, 100));
    FAIL();
  } catch (const ChainRejected& e) {
    EXPECT_EQ(e.reason(), ChainFault::ZeroDifficulty);
  }
  EXPECT_EQ(window.size(), 1u);
  EXPECT_EQ(branch.size(), 1u);
}

TEST(HistoryWindow, EvictsOldestWhenFull) {
  const auto keys = make_keys(2);
  HistoryWindow window(40);
  Branch branch;
  append_all(window, branch, round_robin({&keys[0], &keys[1]}, 41, 50));
  EXPECT_EQ(window.size(), 40u);
  EXPECT_EQ(window.blocks().front().height, 1u);
  EXPECT_EQ(branch.size(), 41u);
  EXPECT_EQ(window.count_for(id_of(keys[0])), 20u);
  EXPECT_EQ(window.count_for(id_of(keys[1])), 20u);
  EXPECT_THROW(HistoryWindow(0), ChainRejected);
}

TEST(HistoryWindow, CountsMatchRecountUnderRandomAppends) {
  const auto keys = make_keys(4);
  std::mt19937_64 rng(21);
  for (std::size_t capacity : {1u, 3u, 17u, 40u}) {
    HistoryWindow window(capacity);
    for (std::uint64_t h = 0; h < 200; ++h) {
      window.push(Block::mine(keys[rng() % keys.size()], h, 1, h));
      ASSERT_LE(window.size(), capacity);
      std::map<MinerId, std::size_t> recount;
      for (const auto& b : window.blocks()) ++recount[b.miner];
      ASSERT_EQ(window.miner_counts(), recount) << "capacity " << capacity << " h " << h;
    }
  }
}

TEST(MinerFrequency, PublishedValues) {
  const auto keys = make_keys(3);
  HistoryWindow window(100);
  Branch branch;
  append_all(window, branch, round_robin({&keys[0], &keys[1]}, 30, 50));
  EXPECT_EQ(miner_frequency(window, id_of(keys[0])), Rational(1, 2));

  append_all(window, branch, round_robin({&keys[0], &keys[1]}, 10, 50, 30));
  append_block(window, branch, Block::mine(keys[2], 40, 60, 2000));
  const auto r3 = miner_frequency(window, id_of(keys[2]));
  EXPECT_EQ(r3, Rational(1, 41));
  EXPECT_NEAR(to_double(r3), 0.02439, 1e-5);
  EXPECT_EQ(format_significant(miner_frequency(window, id_of(keys[0]))), "0.4878");
}

TEST(MinerFrequency, EmptyWindowIsZeroAndSumIsOne) {
  const auto keys = make_keys(5);
  HistoryWindow empty;
  EXPECT_EQ(miner_frequency(empty, id_of(keys[0])).numerator(), 0);

  std::mt19937_64 rng(4);
  HistoryWindow window(23);
  for (std::uint64_t h = 0; h < 60; ++h) {
    window.push(Block::mine(keys[rng() % keys.size()], h, 1, h));
    Rational sum(0);
    for (const auto& k : keys) sum += miner_frequency(window, id_of(k));
    ASSERT_EQ(sum, Rational(1));
  }
}

TEST(Branch, SerializeParseRoundTrip) {
  const auto keys = make_keys(3);
  const Branch branch(round_robin({&keys[0], &keys[1], &keys[2]}, 12, 7, 5));
  const auto text = serialize_branch(branch);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 12);
  EXPECT_EQ(parse_branch(text), branch);
}

TEST(Branch, ParseRejectsTamperedAndMalformedLines) {
  const auto keys = make_keys(1);
  const Branch branch(round_robin({&keys[0]}, 2, 5));
  auto text = serialize_branch(branch);

  auto tampered = text;
  tampered.replace(tampered.find(" 5 "), 3, " 6 ");
  try {
    parse_branch(tampered);
    FAIL();
  } catch (const ChainRejected& e) {
    EXPECT_EQ(e.reason(), ChainFault::BadSignature);
  }
  try {
    parse_branch("0 zz 1 1 00\n");
    FAIL();
  } catch (const ChainRejected& e) {
    EXPECT_EQ(e.reason(), ChainFault::Parse);
  }
  EXPECT_THROW(parse_branch("1 2 3\n"), ChainRejected);
  EXPECT_TRUE(parse_branch("").empty());
}

TEST(MinerId, AddressIsStableAndShort) {
  const auto keys = make_keys(2);
  const auto a = id_of(keys[0]).address();
  EXPECT_EQ(a.size(), 42u);
  EXPECT_EQ(a.rfind("0x", 0), 0u);
  EXPECT_EQ(a, id_of(keys[0]).address());
  EXPECT_NE(a, id_of(keys[1]).address());
}
