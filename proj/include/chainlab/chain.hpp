#pragma once

#include <chainlab/errors.hpp>
#include <chainlab/numeric.hpp>
#include <chainlab/primitives.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace chainlab {

/// A miner is identified by its signing key.
struct MinerId {
  PublicKey key;

  friend bool operator==(const MinerId&, const MinerId&) = default;
  friend auto operator<=>(const MinerId&, const MinerId&) = default;

  /// Short 20-byte display address derived from the key.
  [[nodiscard]] std::string address() const {
    auto d = hash(ByteView(key.bytes));
    return "0x" + to_hex(ByteView(d.bytes).first(20));
  }
};

enum class ChainFault {
  BadSignature,
  HeightGap,
  TimestampRegression,
  ZeroDifficulty,
  ZeroCapacity,
  NotContiguous,
  Parse,
};

using ChainRejected = Rejected<ChainFault>;

struct Block {
  std::uint64_t height = 0;
  MinerId miner;
  std::uint64_t difficulty = 1;
  std::uint64_t timestamp = 0;
  Signature signature;

  friend bool operator==(const Block&, const Block&) = default;

  /// The signed header fields: (height, miner, difficulty, timestamp).
  [[nodiscard]] Bytes signing_payload() const {
    FieldEncoder enc;
    enc.add_uint(height).add_bytes(miner.key.bytes).add_uint(difficulty).add_uint(timestamp);
    return enc.bytes();
  }

  /// Block hash: the header plus its signature.
  [[nodiscard]] Digest256 hash() const {
    FieldEncoder enc;
    enc.add_bytes(signing_payload()).add_bytes(signature.bytes());
    return enc.hash();
  }

  [[nodiscard]] bool signature_valid() const {
    return verify(miner.key, signing_payload(), signature);
  }

  static Block mine(const KeyPair& miner, std::uint64_t height, std::uint64_t difficulty,
                    std::uint64_t timestamp) {
    Block b;
    b.height = height;
    b.miner = MinerId{miner.public_key};
    b.difficulty = difficulty;
    b.timestamp = timestamp;
    b.signature = sign(miner.private_key, b.signing_payload());
    return b;
  }
};

/// Ordered block sequence; heights step by exactly one and timestamps never
/// go backwards.
class Branch {
 public:
  Branch() = default;

  explicit Branch(std::vector<Block> blocks) {
    for (auto& b : blocks) push_back(std::move(b));
  }

  /// Throws if `block` would break the height or timestamp invariants.
  void check_extends(const Block& block) const {
    if (block.difficulty == 0) {
      throw ChainRejected(ChainFault::ZeroDifficulty, "block difficulty must be positive");
    }
    if (blocks_.empty()) return;
    if (block.height != blocks_.back().height + 1) {
      throw ChainRejected(ChainFault::HeightGap,
                          "height " + std::to_string(block.height) + " does not follow " +
                              std::to_string(blocks_.back().height));
    }
    if (block.timestamp < blocks_.back().timestamp) {
      throw ChainRejected(ChainFault::TimestampRegression, "block timestamp goes backwards");
    }
  }

  void push_back(Block block) {
    check_extends(block);
    blocks_.push_back(std::move(block));
  }

  [[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }
  [[nodiscard]] std::size_t size() const { return blocks_.size(); }
  [[nodiscard]] bool empty() const { return blocks_.empty(); }
  [[nodiscard]] const Block& front() const { return blocks_.front(); }
  [[nodiscard]] const Block& back() const { return blocks_.back(); }
  [[nodiscard]] const Block& operator[](std::size_t i) const { return blocks_[i]; }

  friend bool operator==(const Branch&, const Branch&) = default;

 private:
  std::vector<Block> blocks_;
};

/// Global history of the most recent `capacity` blocks, with per-miner block
/// counts kept in step with eviction.
class HistoryWindow {
 public:
  static constexpr std::size_t kDefaultCapacity = 40;

  explicit HistoryWindow(std::size_t capacity = kDefaultCapacity) : capacity_(capacity) {
    if (capacity_ == 0) {
      throw ChainRejected(ChainFault::ZeroCapacity, "history window capacity must be positive");
    }
  }

  void push(const Block& block) {
    if (blocks_.size() == capacity_) {
      auto& oldest = blocks_.front();
      if (auto it = counts_.find(oldest.miner); it != counts_.end() && --it->second == 0) {
        counts_.erase(it);
      }
      blocks_.pop_front();
    }
    blocks_.push_back(block);
    ++counts_[block.miner];
  }

  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  [[nodiscard]] std::size_t size() const { return blocks_.size(); }
  [[nodiscard]] bool empty() const { return blocks_.empty(); }
  [[nodiscard]] const std::deque<Block>& blocks() const { return blocks_; }

  [[nodiscard]] std::size_t count_for(const MinerId& miner) const {
    auto it = counts_.find(miner);
    return it == counts_.end() ? 0 : it->second;
  }

  [[nodiscard]] const std::map<MinerId, std::size_t>& miner_counts() const { return counts_; }

  /// The window contents as a branch; requires contiguous heights.
  [[nodiscard]] Branch as_branch() const {
    Branch b;
    for (const auto& blk : blocks_) {
      try {
        b.push_back(blk);
      } catch (const ChainRejected&) {
        throw ChainRejected(ChainFault::NotContiguous, "history window is not a contiguous branch");
      }
    }
    return b;
  }

 private:
  std::size_t capacity_;
  std::deque<Block> blocks_;
  std::map<MinerId, std::size_t> counts_;
};

/// Share of the window mined by `miner`; 0 for an empty window.
inline Rational miner_frequency(const HistoryWindow& window, const MinerId& miner) {
  if (window.empty()) return Rational(0);
  return Rational(static_cast<std::int64_t>(window.count_for(miner)),
                  static_cast<std::int64_t>(window.size()));
}

/// Signature-gated append to both the branch and the global window. Nothing
/// is modified when the block is rejected.
inline void append_block(HistoryWindow& window, Branch& branch, const Block& block) {
  if (!block.signature_valid()) {
    throw ChainRejected(ChainFault::BadSignature,
                        "block " + std::to_string(block.height) + " signature does not verify");
  }
  branch.check_extends(block);
  branch.push_back(block);
  window.push(block);
}

/// Line-oriented trace: `height miner_id difficulty timestamp sig_hex`.
inline std::string serialize_branch(const Branch& branch) {
  std::string out;
  for (const auto& b : branch.blocks()) {
    out += std::to_string(b.height) + ' ' + b.miner.key.hex() + ' ' + std::to_string(b.difficulty) +
           ' ' + std::to_string(b.timestamp) + ' ' + b.signature.hex() + '\n';
  }
  return out;
}

/// Inverse of serialize_branch; each block must carry a valid signature.
inline Branch parse_branch(std::string_view text) {
  Branch branch;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    Block b;
    std::string miner_hex, sig_hex, extra;
    if (!(fields >> b.height >> miner_hex >> b.difficulty >> b.timestamp >> sig_hex) ||
        (fields >> extra)) {
      throw ChainRejected(ChainFault::Parse, "malformed block line " + std::to_string(line_no));
    }
    try {
      b.miner = MinerId{PublicKey::from_hex(miner_hex)};
      b.signature = Signature::from_hex(sig_hex);
    } catch (const std::invalid_argument& e) {
      throw ChainRejected(ChainFault::Parse,
                          "line " + std::to_string(line_no) + ": " + std::string(e.what()));
    }
    if (!b.signature_valid()) {
      throw ChainRejected(ChainFault::BadSignature,
                          "line " + std::to_string(line_no) + ": signature does not verify");
    }
    branch.push_back(std::move(b));
  }
  return branch;
}

}  // namespace chainlab
