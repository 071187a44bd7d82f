#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ktae/error.hpp"

namespace ktae {

using TokenId = std::int64_t;

/// One sampled response: its response tokens (prompt excluded) and scalar reward.
struct Rollout {
  std::vector<TokenId> tokens;
  std::optional<std::vector<std::string>> texts;
  double reward = 0.0;

  bool operator==(const Rollout&) const = default;
};

struct RolloutGroup {
  std::string group_id;
  std::vector<Rollout> rollouts;
  // Reward strictly above the threshold marks a rollout as correct.
  double correctness_threshold = 0.5;

  std::size_t size() const noexcept { return rollouts.size(); }

  bool operator==(const RolloutGroup&) const = default;
};

/// 2x2 counts for one token: correct/incorrect rollouts containing (a, b) or
/// omitting (c, d) it.
struct ContingencyTable {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;

  std::int64_t total() const noexcept { return a + b + c + d; }
  std::int64_t correct() const noexcept { return a + c; }
  std::int64_t incorrect() const noexcept { return b + d; }
  std::int64_t containing() const noexcept { return a + b; }
  std::int64_t omitting() const noexcept { return c + d; }

  /// The table of the same token after the correct/incorrect labels are swapped.
  ContingencyTable swapped() const noexcept { return {b, a, d, c}; }

  bool valid() const noexcept { return a >= 0 && b >= 0 && c >= 0 && d >= 0; }

  bool operator==(const ContingencyTable&) const = default;
};

/// A group whose invariants have been checked, together with its cached
/// correct/incorrect partition. Immutable once constructed.
class ValidatedGroup {
 public:
  const RolloutGroup& group() const noexcept { return group_; }
  std::size_t size() const noexcept { return group_.rollouts.size(); }
  const Rollout& rollout(std::size_t i) const { return group_.rollouts.at(i); }

  bool is_correct(std::size_t i) const { return correct_.at(i) != 0; }
  std::size_t num_correct() const noexcept { return num_correct_; }
  std::size_t num_incorrect() const noexcept { return size() - num_correct_; }
  std::span<const std::uint8_t> correctness() const noexcept { return correct_; }

 private:
  friend ValidatedGroup validate_group(RolloutGroup group);

  RolloutGroup group_;
  std::vector<std::uint8_t> correct_;
  std::size_t num_correct_ = 0;
};

/// Checks the group invariants and partitions rollouts by the threshold.
/// Throws Error{EmptyGroup | EmptyRollout | LengthMismatch}.
ValidatedGroup validate_group(RolloutGroup group);

}  // namespace ktae
