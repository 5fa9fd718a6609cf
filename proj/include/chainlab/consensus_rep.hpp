#pragma once

// Reputation-weighted PBFT round: request -> vote -> pre-commit (reputation
// evaluation, removal sweep, threshold test) -> commit (reward / penalty).
// Also the plain one-identity-one-vote baseline it is compared against.

#include <chainlab/chain.hpp>
#include <chainlab/errors.hpp>
#include <chainlab/numeric.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <string>
#include <vector>

namespace chainlab {

enum class ConsensusFault {
  NoNode,
  WrongPhase,
  AlreadyVoted,
  InvalidNode,
  UnknownNode,
  PayloadMismatch,
  NotAccepted,
  BadConfig,
};

using ConsensusRejected = Rejected<ConsensusFault>;

enum class RoundPhase { Idle, Request, Prepare, PreCommit, Commit };

inline std::string to_string(RoundPhase phase) {
  switch (phase) {
    case RoundPhase::Idle: return "Idle";
    case RoundPhase::Request: return "Request";
    case RoundPhase::Prepare: return "Prepare";
    case RoundPhase::PreCommit: return "PreCommit";
    case RoundPhase::Commit: return "Commit";
  }
  return "?";
}

/// Scaled reproduces the contract's integer threshold (2f+1)*(initial/2)/n;
/// Normalized is the textbook (2f+1)/n.
enum class ThresholdForm { Scaled, Normalized };

struct ReputationConfig {
  std::int64_t initial_reputation = 100;
  std::int64_t reward = 10;
  std::int64_t penalty = 10;
  std::int64_t removal_floor = 50;
  Rational phi{1};
  ThresholdForm threshold_form = ThresholdForm::Scaled;

  void validate() const {
    if (initial_reputation <= 0 || reward < 0 || penalty < 0 || removal_floor < 0) {
      throw ConsensusRejected(ConsensusFault::BadConfig, "invalid reputation config");
    }
  }
};

struct ReputationNode {
  MinerId id;
  std::int64_t reputation = 0;
  bool is_valid = true;
  bool voted = false;
  std::optional<bool> vote;
};

struct RoundState {
  RoundPhase phase = RoundPhase::Idle;
  std::uint64_t block_height = 0;
  Digest256 payload_digest;
  bool accepted = false;
};

/// Interaction term: sum over valid peers j != i of (R_j - R_i) * phi,
/// truncated toward zero.
inline std::int64_t reputation_delta(const ReputationNode& node,
                                     std::span<const ReputationNode> peers,
                                     const Rational& phi) {
  Rational sum(0);
  for (const auto& peer : peers) {
    if (peer.id == node.id || !peer.is_valid) continue;
    sum += Rational(peer.reputation - node.reputation) * phi;
  }
  return sum.numerator() / sum.denominator();
}

/// Supporter-reputation threshold for `n` nodes; f = floor((n-1)/3).
inline Rational threshold(std::size_t n, const ReputationConfig& cfg) {
  if (n == 0) throw ConsensusRejected(ConsensusFault::NoNode, "No node!");
  const auto nodes = static_cast<std::int64_t>(n);
  const std::int64_t quorum = 2 * ((nodes - 1) / 3) + 1;
  if (cfg.threshold_form == ThresholdForm::Normalized) return Rational(quorum, nodes);
  return Rational(quorum) * Rational(cfg.initial_reputation, 2) / Rational(nodes);
}

inline void cast_vote(ReputationNode& node, const RoundState& round, bool choice) {
  if (round.phase != RoundPhase::Request && round.phase != RoundPhase::Prepare) {
    throw ConsensusRejected(ConsensusFault::WrongPhase, "Status invalid --!");
  }
  if (!node.is_valid) throw ConsensusRejected(ConsensusFault::InvalidNode, "Node is invalid !");
  if (node.voted) throw ConsensusRejected(ConsensusFault::AlreadyVoted, "You already voted !");
  node.voted = true;
  node.vote = choice;
}

struct PrecommitOutcome {
  bool accepted = false;
  std::int64_t supporter_sum = 0;
  Rational threshold;
  std::vector<std::int64_t> deltas;  // one per node, 0 for invalid nodes
  std::vector<MinerId> removed;
};

inline std::size_t valid_count(std::span<const ReputationNode> nodes) {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.is_valid; }));
}

/// Applies the interaction term to every valid node (all deltas computed from
/// the same pre-round snapshot), removes nodes at or below the floor, then
/// sums the reputation of valid affirmative voters against the threshold.
inline PrecommitOutcome precommit(RoundState& round, std::vector<ReputationNode>& nodes,
                                  const Digest256& payload, const ReputationConfig& cfg) {
  if (round.phase != RoundPhase::Prepare) {
    throw ConsensusRejected(ConsensusFault::WrongPhase, "Status invalid --!");
  }
  if (payload != round.payload_digest) {
    throw ConsensusRejected(ConsensusFault::PayloadMismatch, "Payload does not match request !");
  }

  PrecommitOutcome out;
  out.threshold = threshold(valid_count(nodes), cfg);

  const std::vector<ReputationNode> snapshot = nodes;
  out.deltas.assign(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!snapshot[i].is_valid) continue;
    out.deltas[i] = reputation_delta(snapshot[i], snapshot, cfg.phi);
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto& node = nodes[i];
    if (!node.is_valid) continue;
    node.reputation = std::max<std::int64_t>(0, node.reputation + out.deltas[i]);
    if (node.reputation <= cfg.removal_floor) {
      node.is_valid = false;
      out.removed.push_back(node.id);
      continue;
    }
    if (node.voted && node.vote.value_or(false)) out.supporter_sum += node.reputation;
  }

  out.accepted = Rational(out.supporter_sum) >= out.threshold;
  round.accepted = out.accepted;
  round.phase = RoundPhase::PreCommit;
  return out;
}

/// Voters that agree with the accepted outcome gain `reward`, the rest lose
/// `penalty` (floored at 0). Non-voters are untouched.
inline void commit(RoundState& round, std::vector<ReputationNode>& nodes,
                   const ReputationConfig& cfg) {
  if (round.phase != RoundPhase::PreCommit) {
    throw ConsensusRejected(ConsensusFault::WrongPhase, "Status invalid --!");
  }
  if (!round.accepted) {
    throw ConsensusRejected(ConsensusFault::NotAccepted, "Pre-commit was not accepted !");
  }
  for (auto& node : nodes) {
    if (!node.is_valid || !node.voted) continue;
    if (node.vote.value_or(false)) {
      node.reputation += cfg.reward;
    } else {
      node.reputation = std::max<std::int64_t>(0, node.reputation - cfg.penalty);
    }
  }
  round.phase = RoundPhase::Commit;
}

/// Round engine owning the node set.
class ReputationConsensus {
 public:
  ReputationConsensus(const std::vector<MinerId>& ids, ReputationConfig cfg)
      : cfg_(std::move(cfg)) {
    cfg_.validate();
    for (const auto& id : ids) {
      nodes_.push_back(ReputationNode{id, cfg_.initial_reputation, true, false, std::nullopt});
    }
  }

  /// Opens a new round. Allowed from Idle or after a finished round.
  void request(ByteView payload, std::uint64_t block_height) {
    if (round_.phase == RoundPhase::Request || round_.phase == RoundPhase::Prepare) {
      throw ConsensusRejected(ConsensusFault::WrongPhase, "Status invalid --!");
    }
    for (auto& n : nodes_) {
      n.voted = false;
      n.vote.reset();
    }
    round_ = RoundState{RoundPhase::Request, block_height, hash(payload), false};
  }

  void vote(const MinerId& id, bool choice) {
    cast_vote(mutable_node(id), round_, choice);
    round_.phase = RoundPhase::Prepare;
  }

  /// Pre-commit, followed by commit when accepted.
  PrecommitOutcome run_precommit(const Digest256& payload) {
    auto out = precommit(round_, nodes_, payload, cfg_);
    if (out.accepted) commit(round_, nodes_, cfg_);
    return out;
  }

  [[nodiscard]] const std::vector<ReputationNode>& nodes() const { return nodes_; }
  [[nodiscard]] const RoundState& round() const { return round_; }
  [[nodiscard]] const ReputationConfig& config() const { return cfg_; }

  [[nodiscard]] std::int64_t total_reputation() const {
    std::int64_t total = 0;
    for (const auto& n : nodes_) {
      if (n.is_valid) total += n.reputation;
    }
    return total;
  }

  [[nodiscard]] const ReputationNode& node(const MinerId& id) const {
    auto it = std::find_if(nodes_.begin(), nodes_.end(), [&](const auto& n) { return n.id == id; });
    if (it == nodes_.end()) throw ConsensusRejected(ConsensusFault::UnknownNode, "Unknown node !");
    return *it;
  }

 private:
  ReputationNode& mutable_node(const MinerId& id) {
    return const_cast<ReputationNode&>(std::as_const(*this).node(id));
  }

  ReputationConfig cfg_;
  std::vector<ReputationNode> nodes_;
  RoundState round_;
};

/// One-identity-one-vote tally with no reputation, the Sybil-exposed baseline.
class PlainVoting {
 public:
  void vote(const MinerId& voter, bool choice) {
    if (!voted_.insert({voter, choice}).second) {
      throw ConsensusRejected(ConsensusFault::AlreadyVoted, "You already voted !");
    }
    ++tickets_[choice];
  }

  [[nodiscard]] std::uint64_t tickets(bool choice) const {
    auto it = tickets_.find(choice);
    return it == tickets_.end() ? 0 : it->second;
  }

  /// Majority of tickets; ties reject.
  [[nodiscard]] bool accepted() const { return tickets(true) > tickets(false); }

 private:
  std::map<MinerId, bool> voted_;
  std::map<bool, std::uint64_t> tickets_;
};

}  // namespace chainlab
