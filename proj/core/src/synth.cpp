#include "ktae/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace ktae::synth {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::SpecError, what);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double ratio_or_one(std::int64_t num, std::int64_t den) {
  return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 1.0;
}

}  // namespace

std::int64_t correct_count(const SynthSpec& spec) {
  return std::llround(spec.correct_fraction * static_cast<double>(spec.group_size));
}

void validate(const SynthSpec& spec) {
  require(spec.num_groups >= 0, "num_groups must be >= 0");
  require(spec.group_size >= 2, "G must be >= 2");
  require(spec.correct_fraction > 0.0 && spec.correct_fraction < 1.0,
          "correct_fraction must lie in (0, 1)");
  const std::int64_t n_correct = correct_count(spec);
  require(n_correct > 0 && n_correct < spec.group_size,
          "round(correct_fraction * G) must lie strictly between 0 and G");
  require(spec.base_vocab >= 1, "base_vocab must be >= 1");
  require(spec.min_len >= 1 && spec.min_len <= spec.max_len,
          "rollout_len_range must satisfy 1 <= min <= max");

  std::set<TokenId> seen;
  for (const auto* list : {&spec.planted_positive, &spec.planted_negative, &spec.planted_neutral}) {
    for (TokenId t : *list) {
      require(t >= spec.base_vocab,
              "planted token " + std::to_string(t) + " overlaps the filler vocabulary");
      require(seen.insert(t).second,
              "planted token " + std::to_string(t) + " appears in more than one planted slot");
    }
  }
}

std::vector<RolloutGroup> generate(const SynthSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<TokenId> filler(0, spec.base_vocab - 1);
  std::uniform_int_distribution<std::int64_t> length(spec.min_len, spec.max_len);

  const std::int64_t n_correct = correct_count(spec);
  std::vector<RolloutGroup> groups;
  groups.reserve(static_cast<std::size_t>(spec.num_groups));

  for (std::int64_t g = 0; g < spec.num_groups; ++g) {
    RolloutGroup group;
    group.group_id = "synth-" + std::to_string(g);

    std::vector<bool> labels(static_cast<std::size_t>(spec.group_size), false);
    std::fill_n(labels.begin(), n_correct, true);
    std::shuffle(labels.begin(), labels.end(), rng);

    for (bool correct : labels) {
      Rollout r;
      r.reward = correct ? 1.0 : 0.0;
      const std::int64_t len = length(rng);
      std::vector<std::string> texts;
      for (std::int64_t t = 0; t < len; ++t) {
        const TokenId id = filler(rng);
        r.tokens.push_back(id);
        texts.push_back(" w" + std::to_string(id));
      }

      auto plant = [&](TokenId id, const char* tag) {
        std::uniform_int_distribution<std::size_t> where(0, r.tokens.size());
        const std::size_t pos = where(rng);
        r.tokens.insert(r.tokens.begin() + static_cast<std::ptrdiff_t>(pos), id);
        texts.insert(texts.begin() + static_cast<std::ptrdiff_t>(pos),
                     std::string(" ") + tag + std::to_string(id));
      };
      for (TokenId id : correct ? spec.planted_positive : spec.planted_negative) {
        plant(id, correct ? "POS" : "NEG");
      }
      for (TokenId id : spec.planted_neutral) plant(id, "NEU");

      r.texts = std::move(texts);
      group.rollouts.push_back(std::move(r));
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

RecoveryReport recovery_report(const std::vector<RolloutGroup>& groups, const SynthSpec& spec,
                               const KtaeConfig& config) {
  const std::unordered_set<TokenId> positive(spec.planted_positive.begin(),
                                             spec.planted_positive.end());
  const std::unordered_set<TokenId> negative(spec.planted_negative.begin(),
                                             spec.planted_negative.end());
  const std::unordered_set<TokenId> neutral(spec.planted_neutral.begin(),
                                            spec.planted_neutral.end());

  RecoveryReport report;
  std::vector<double> filler_abs_ktv;
  double plant_abs_delta = 0.0;
  double plant_abs_ktv = 0.0;
  std::int64_t plant_count = 0;
  double filler_abs_delta = 0.0;

  std::vector<TokenId> plants = spec.planted_positive;
  plants.insert(plants.end(), spec.planted_negative.begin(), spec.planted_negative.end());
  std::unordered_map<TokenId, std::pair<double, std::int64_t>> rank_acc;  // sum, worst
  std::unordered_map<TokenId, std::int64_t> rank_seen;

  for (const RolloutGroup& raw : groups) {
    const ValidatedGroup group = validate_group(raw);
    const auto start = std::chrono::steady_clock::now();
    const AdvantageMatrix m = compute_advantages(group, config);
    const auto stop = std::chrono::steady_clock::now();
    report.group_millis.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    ++report.groups;

    std::vector<double> magnitudes;
    magnitudes.reserve(m.token_stats.size());
    for (const auto& [token, s] : m.token_stats) magnitudes.push_back(std::abs(s.key_token_value));
    std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());

    for (const auto& [token, s] : m.token_stats) {
      if (positive.contains(token)) {
        ++report.positive_checked;
        report.positive_correct_sign += s.delta > 0.0 ? 1 : 0;
      } else if (negative.contains(token)) {
        ++report.negative_checked;
        report.negative_correct_sign += s.delta < 0.0 ? 1 : 0;
      } else if (neutral.contains(token)) {
        report.neutral_max_abs_delta = std::max(report.neutral_max_abs_delta, std::abs(s.delta));
        continue;
      } else {
        filler_abs_ktv.push_back(std::abs(s.key_token_value));
        filler_abs_delta += std::abs(s.delta);
        continue;
      }
      plant_abs_delta += std::abs(s.delta);
      plant_abs_ktv += std::abs(s.key_token_value);
      ++plant_count;

      const double mag = std::abs(s.key_token_value);
      // 1 + number of tokens with strictly larger |ktv|
      const auto rank = 1 + static_cast<std::int64_t>(
                                std::lower_bound(magnitudes.begin(), magnitudes.end(), mag,
                                                 std::greater<>()) -
                                magnitudes.begin());
      auto& [sum, worst] = rank_acc[token];
      sum += static_cast<double>(rank);
      worst = std::max(worst, rank);
      ++rank_seen[token];
    }
  }

  report.sign_accuracy_positive = ratio_or_one(report.positive_correct_sign, report.positive_checked);
  report.sign_accuracy_negative = ratio_or_one(report.negative_correct_sign, report.negative_checked);
  report.sign_accuracy = ratio_or_one(report.positive_correct_sign + report.negative_correct_sign,
                                      report.positive_checked + report.negative_checked);
  if (plant_count > 0) {
    report.mean_abs_delta_plants = plant_abs_delta / static_cast<double>(plant_count);
    report.mean_abs_ktv_plants = plant_abs_ktv / static_cast<double>(plant_count);
  }
  if (!filler_abs_ktv.empty()) {
    report.mean_abs_delta_filler = filler_abs_delta / static_cast<double>(filler_abs_ktv.size());
  }
  report.filler_abs_ktv_p95 = percentile(std::move(filler_abs_ktv), 0.95);

  for (TokenId token : plants) {
    const auto seen = rank_seen.find(token);
    if (seen == rank_seen.end()) continue;
    const auto& [sum, worst] = rank_acc.at(token);
    report.plant_ranks.push_back({token, sum / static_cast<double>(seen->second), worst});
  }
  return report;
}

}  // namespace ktae::synth
