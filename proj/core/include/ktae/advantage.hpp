#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ktae/config.hpp"
#include "ktae/core.hpp"

namespace ktae {

/// Group-normalized rollout advantages (R_i - mean) / max(std, eps), using
/// the population standard deviation.
struct GrpoBaseline {
  double mean_reward = 0.0;
  double std_reward = 0.0;
  std::vector<double> advantages;
};

/// Throws Error{TooFewRollouts} for fewer than two rewards.
GrpoBaseline grpo_advantages(std::span<const double> rewards, double std_epsilon = 1e-8);

/// Dynamic-sampling admissibility: at least one correct and one incorrect rollout.
bool dapo_admissible(const ValidatedGroup& group) noexcept;

/// (h1 F + h2 IG) D
double key_token_value(double fisher_score, double info_gain, double direction, double h1,
                       double h2) noexcept;

/// sigmoid(ktv) - 0.5, kept strictly inside (-0.5, 0.5).
double advantage_delta(double key_token_value) noexcept;

/// Per-token intermediate values for one token type in one group.
struct TokenStats {
  TokenId token = 0;
  ContingencyTable table;
  double fisher_p = 1.0;
  double fisher_score = 0.0;
  double info_gain = 0.0;
  double tf_true = 0.0;
  double tf_false = 0.0;
  double tf_score_true = 0.0;
  double tf_score_false = 0.0;
  double direction = 0.0;
  double key_token_value = 0.0;
  // Shift applied to every position holding this token.
  double delta = 0.0;
};

struct AdvantageMatrix {
  std::vector<double> rollout_advantages;
  std::vector<std::vector<double>> token_advantages;
  std::map<TokenId, TokenStats> token_stats;

  const TokenStats& stats(TokenId token) const { return token_stats.at(token); }
};

/// Occurrence index of one token type: its contingency table and raw counts.
struct TokenOccurrence {
  TokenId token = 0;
  ContingencyTable table;
  std::int64_t tf_true = 0;
  std::int64_t tf_false = 0;
};

/// Tables for every distinct token of the group, sorted by token id. Each
/// rollout is scanned once.
std::vector<TokenOccurrence> index_tokens(const ValidatedGroup& group);

/// Full key-token advantage estimation for one group.
///
/// Every distinct token receives a key-token-value; each position's
/// advantage is its rollout's GRPO advantage plus sigmoid(ktv) - 0.5.
/// Groups with no correct or no incorrect rollout get ktv = 0 everywhere
/// under DegeneratePolicy::zeros and throw DegenerateGroup under ::error.
AdvantageMatrix compute_advantages(const ValidatedGroup& group, const KtaeConfig& config = {});
AdvantageMatrix compute_advantages(const RolloutGroup& group, const KtaeConfig& config = {});

}  // namespace ktae
