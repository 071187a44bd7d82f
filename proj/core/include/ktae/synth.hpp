#pragma once

#include <cstdint>
#include <vector>

#include "ktae/advantage.hpp"
#include "ktae/config.hpp"
#include "ktae/core.hpp"

namespace ktae::synth {

/// Recipe for synthetic rollout groups with planted key tokens. Filler tokens
/// are drawn from [0, base_vocab); planted ids must lie outside that range.
struct SynthSpec {
  std::uint64_t seed = 0;
  std::int64_t num_groups = 200;
  std::int64_t group_size = 16;
  double correct_fraction = 0.75;
  std::int64_t base_vocab = 2000;
  std::int64_t min_len = 64;
  std::int64_t max_len = 256;
  std::vector<TokenId> planted_positive{5001, 5002};
  std::vector<TokenId> planted_negative{5003, 5004};
  std::vector<TokenId> planted_neutral{5005};

  bool operator==(const SynthSpec&) const = default;
};

/// Throws Error{SpecError} on the first violated invariant.
void validate(const SynthSpec& spec);

/// round(correct_fraction * group_size)
std::int64_t correct_count(const SynthSpec& spec);

/// Deterministic for a fixed seed. Every rollout carries display texts so the
/// groups can be rendered as heatmaps.
std::vector<RolloutGroup> generate(const SynthSpec& spec);

struct PlantRank {
  TokenId token = 0;
  double mean_rank = 0.0;  // 1 = largest |ktv| in its group
  std::int64_t worst_rank = 0;
};

struct RecoveryReport {
  std::int64_t groups = 0;
  std::int64_t positive_checked = 0;
  std::int64_t positive_correct_sign = 0;
  std::int64_t negative_checked = 0;
  std::int64_t negative_correct_sign = 0;
  double sign_accuracy = 0.0;
  double sign_accuracy_positive = 0.0;
  double sign_accuracy_negative = 0.0;
  double neutral_max_abs_delta = 0.0;
  double mean_abs_delta_plants = 0.0;
  double mean_abs_delta_filler = 0.0;
  double mean_abs_ktv_plants = 0.0;
  // 95th percentile (linear interpolation) of |ktv| over all filler token types.
  double filler_abs_ktv_p95 = 0.0;
  std::vector<PlantRank> plant_ranks;
  // Wall-clock of compute_advantages per group, in milliseconds. Not
  // deterministic; kept apart from the statistics above.
  std::vector<double> group_millis;
};

RecoveryReport recovery_report(const std::vector<RolloutGroup>& groups, const SynthSpec& spec,
                               const KtaeConfig& config = {});

}  // namespace ktae::synth
