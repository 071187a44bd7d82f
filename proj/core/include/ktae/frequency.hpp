#pragma once

#include <cstdint>

#include "ktae/config.hpp"
#include "ktae/core.hpp"

namespace ktae::frequency {

/// Mean rollout lengths on each side and across the whole group. An empty
/// side takes the group mean so its normalization factor is neutral.
struct GroupLengths {
  double len_true = 0.0;
  double len_false = 0.0;
  double len_avg = 0.0;
};

GroupLengths group_lengths(const ValidatedGroup& group);

struct TermCounts {
  std::int64_t tf_true = 0;
  std::int64_t tf_false = 0;

  bool operator==(const TermCounts&) const = default;
};

/// Occurrences of `token` in the concatenation of the correct rollouts and in
/// the concatenation of the incorrect ones.
TermCounts raw_term_frequencies(const ValidatedGroup& group, TokenId token);

/// Saturating, length-normalized term frequency:
///   (k1 + 1) tf / (k1 (1 - b + b len_side / len_avg) + tf)
double tf_score(double tf, double len_side, double len_avg, double k1, double b);

/// arcsin sqrt(a/(a+c)) - arcsin sqrt(b/(b+d)), with an empty side contributing 0.
double cohens_h(const ContingencyTable& table);

/// Signed direction of a token's association with correctness: Cohen's h
/// plus h3 (T/F - F/T) on the TF scores clamped below at tf_floor.
///
/// When one side of the table is empty the Cohen's h term for it is 0 under
/// DegeneratePolicy::zeros; DegeneratePolicy::error throws DegenerateGroup.
double direction_score(const ContingencyTable& table, double tf_score_true, double tf_score_false,
                       double h3, double tf_floor,
                       DegeneratePolicy policy = DegeneratePolicy::zeros);

}  // namespace ktae::frequency
