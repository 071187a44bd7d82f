#include "ktae/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>

#include "ktae/frequency.hpp"
#include "ktae/stats.hpp"

namespace ktae {

GrpoBaseline grpo_advantages(std::span<const double> rewards, double std_epsilon) {
  if (rewards.size() < 2) {
    throw Error(Errc::TooFewRollouts,
                "need at least 2 rewards, got " + std::to_string(rewards.size()));
  }
  GrpoBaseline out;
  out.advantages.assign(rewards.size(), 0.0);

  const bool all_equal = std::all_of(rewards.begin(), rewards.end(),
                                     [&](double r) { return r == rewards.front(); });
  if (all_equal) {
    out.mean_reward = rewards.front();
    return out;
  }

  const auto n = static_cast<double>(rewards.size());
  out.mean_reward = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : rewards) ss += (r - out.mean_reward) * (r - out.mean_reward);
  out.std_reward = std::sqrt(ss / n);
  const double scale = std::max(out.std_reward, std_epsilon);
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out.advantages[i] = (rewards[i] - out.mean_reward) / scale;
  }
  return out;
}

bool dapo_admissible(const ValidatedGroup& group) noexcept {
  return group.num_correct() > 0 && group.num_correct() < group.size();
}

double key_token_value(double fisher_score, double info_gain, double direction, double h1,
                       double h2) noexcept {
  // Adding +0.0 folds a signed zero into +0.0.
  return (h1 * fisher_score + h2 * info_gain) * direction + 0.0;
}

double advantage_delta(double key_token_value) noexcept {
  // sigmoid(x) - 0.5 == tanh(x / 2) / 2; the tanh form is odd and keeps
  // precision near zero. Saturation is pulled one ulp inside the open bound.
  static const double limit = std::nextafter(0.5, 0.0);
  return std::clamp(0.5 * std::tanh(0.5 * key_token_value), -limit, limit);
}

std::vector<TokenOccurrence> index_tokens(const ValidatedGroup& group) {
  // One sort of every (token, rollout) position; each token's run then lists
  // its rollouts in order, so distinct-rollout counts fall out of a scan.
  std::vector<std::pair<TokenId, std::uint32_t>> positions;
  std::size_t total = 0;
  for (std::size_t i = 0; i < group.size(); ++i) total += group.rollout(i).tokens.size();
  positions.reserve(total);
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (TokenId t : group.rollout(i).tokens) positions.emplace_back(t, static_cast<std::uint32_t>(i));
  }
  std::sort(positions.begin(), positions.end());

  const auto n_true = static_cast<std::int64_t>(group.num_correct());
  const auto n_false = static_cast<std::int64_t>(group.num_incorrect());
  std::vector<TokenOccurrence> occ;
  for (std::size_t k = 0; k < positions.size();) {
    TokenOccurrence o;
    o.token = positions[k].first;
    std::int64_t last_rollout = -1;
    for (; k < positions.size() && positions[k].first == o.token; ++k) {
      const std::uint32_t r = positions[k].second;
      const bool correct = group.is_correct(r);
      (correct ? o.tf_true : o.tf_false) += 1;
      if (static_cast<std::int64_t>(r) != last_rollout) {
        ++(correct ? o.table.a : o.table.b);
        last_rollout = r;
      }
    }
    o.table.c = n_true - o.table.a;
    o.table.d = n_false - o.table.b;
    occ.push_back(o);
  }
  return occ;
}

AdvantageMatrix compute_advantages(const ValidatedGroup& group, const KtaeConfig& config) {
  validate(config);

  const bool degenerate = !dapo_admissible(group);
  if (degenerate && config.degenerate_policy == DegeneratePolicy::error) {
    throw Error(Errc::DegenerateGroup, "group '" + group.group().group_id + "' has " +
                                           std::to_string(group.num_correct()) + " of " +
                                           std::to_string(group.size()) + " rollouts correct");
  }

  std::vector<double> rewards;
  rewards.reserve(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) rewards.push_back(group.rollout(i).reward);
  GrpoBaseline baseline = grpo_advantages(rewards, config.std_epsilon);

  const frequency::GroupLengths lengths = frequency::group_lengths(group);
  const std::vector<TokenOccurrence> occurrences = index_tokens(group);

  AdvantageMatrix out;
  std::vector<double> deltas;
  deltas.reserve(occurrences.size());

  for (const TokenOccurrence& o : occurrences) {
    TokenStats s;
    s.token = o.token;
    s.table = o.table;
    s.fisher_p = stats::fisher_p(o.table, config.fisher_mode);
    s.fisher_score = stats::fisher_score(s.fisher_p);
    s.info_gain = stats::info_gain(o.table);
    s.tf_true = static_cast<double>(o.tf_true);
    s.tf_false = static_cast<double>(o.tf_false);
    s.tf_score_true =
        frequency::tf_score(s.tf_true, lengths.len_true, lengths.len_avg, config.k1, config.b);
    s.tf_score_false =
        frequency::tf_score(s.tf_false, lengths.len_false, lengths.len_avg, config.k1, config.b);
    s.direction = frequency::direction_score(o.table, s.tf_score_true, s.tf_score_false, config.h3,
                                             config.tf_floor, DegeneratePolicy::zeros);
    s.key_token_value = degenerate ? 0.0
                                   : key_token_value(s.fisher_score, s.info_gain, s.direction,
                                                     config.h1, config.h2);
    s.delta = advantage_delta(s.key_token_value);
    deltas.push_back(s.delta);
    out.token_stats.emplace_hint(out.token_stats.end(), o.token, s);
  }

  out.token_advantages.resize(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    const double base = baseline.advantages[i];
    const auto& tokens = group.rollout(i).tokens;
    auto& row = out.token_advantages[i];
    row.reserve(tokens.size());
    for (TokenId token : tokens) {
      const auto slot = std::lower_bound(occurrences.begin(), occurrences.end(), token,
                                         [](const TokenOccurrence& o, TokenId t) { return o.token < t; });
      double v = base + deltas[static_cast<std::size_t>(slot - occurrences.begin())];
      // Rounding of the sum can land exactly on the +-0.5 bound; step back.
      while (std::abs(v - base) >= 0.5) v = std::nextafter(v, base);
      row.push_back(v);
    }
  }
  out.rollout_advantages = std::move(baseline.advantages);
  return out;
}

AdvantageMatrix compute_advantages(const RolloutGroup& group, const KtaeConfig& config) {
  return compute_advantages(validate_group(group), config);
}

}  // namespace ktae
