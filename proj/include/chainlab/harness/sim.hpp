#pragma once

// Logical clock and block producer shared by the scenario scripts. A
// transaction sent now lands in the next block (height + 1) stamped with the
// current clock time; a successful transaction seals that block.

#include <chainlab/chain.hpp>
#include <chainlab/escrow.hpp>
#include <chainlab/lottery_rng.hpp>

#include <cstdint>
#include <random>

namespace chainlab::harness {

struct SimClock {
  std::uint64_t now = 0;
  std::uint64_t height = 0;
};

class SimChain {
 public:
  /// Seeds the chain with a filler block at `start_height` / `start_time`.
  SimChain(std::mt19937_64& rng, std::uint64_t start_height, std::uint64_t start_time,
           std::uint64_t difficulty = 1)
      : filler_(KeyPair::generate(rng)), difficulty_(difficulty) {
    clock_.now = start_time;
    clock_.height = start_height;
    tip_ = Block::mine(filler_, start_height, difficulty_, start_time);
  }

  [[nodiscard]] const SimClock& clock() const { return clock_; }
  [[nodiscard]] const Block& tip() const { return tip_; }
  [[nodiscard]] std::uint64_t blocks_sealed() const { return sealed_; }
  [[nodiscard]] MinerId filler_miner() const { return MinerId{filler_.public_key}; }

  void advance_time(std::uint64_t dt) { clock_.now += dt; }

  /// The block a transaction sent now would land in.
  [[nodiscard]] ChainPoint next_point() const { return {clock_.height + 1, clock_.now}; }

  [[nodiscard]] ChainContext pending_context() const {
    return {tip_.hash(), clock_.now, difficulty_};
  }

  /// Seals the next block at the current time and returns its height.
  std::uint64_t mine_filler() {
    Block next = Block::mine(filler_, clock_.height + 1, difficulty_, clock_.now);
    tip_ = std::move(next);
    clock_.height = tip_.height;
    ++sealed_;
    return clock_.height;
  }

  void advance_second_and_mine() {
    advance_time(1);
    mine_filler();
  }

  void commit_tx_block() { mine_filler(); }

 private:
  KeyPair filler_;
  std::uint64_t difficulty_;
  SimClock clock_;
  Block tip_;
  std::uint64_t sealed_ = 0;
};

}  // namespace chainlab::harness
