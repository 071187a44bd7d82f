#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ktae/advantage.hpp"
#include "ktae/config.hpp"
#include "ktae/core.hpp"
#include "ktae/synth.hpp"

namespace ktae::io {

// Line-delimited wire formats. Every parse failure throws Error{ParseError};
// unknown fields are ignored.

RolloutGroup parse_group_record(std::string_view line);
std::string serialize_group_record(const RolloutGroup& group);

/// Parsed form of an output line. token_stats is empty when the record was
/// written without statistics.
struct AdvantageRecord {
  std::string group_id;
  std::vector<double> rollout_advantages;
  std::vector<std::vector<double>> token_advantages;
  std::map<TokenId, TokenStats> token_stats;
};

std::string serialize_advantage_record(std::string_view group_id, const AdvantageMatrix& matrix,
                                       bool with_stats);
AdvantageRecord parse_advantage_record(std::string_view line);

// Config documents are flat objects keyed by field name; missing keys keep
// their defaults. Errors throw Error{ConfigError}.

KtaeConfig parse_config(std::string_view text, KtaeConfig base = {});
std::string serialize_config(const KtaeConfig& config);
KtaeConfig load_config(const std::filesystem::path& path, KtaeConfig base = {});

// Synth specs use the same flat-object format. Errors throw Error{SpecError}.

synth::SynthSpec parse_synth_spec(std::string_view text);
std::string serialize_synth_spec(const synth::SynthSpec& spec);
synth::SynthSpec load_synth_spec(const std::filesystem::path& path);

/// Machine-readable recovery report. Timings go under "timing".
std::string serialize_report(const synth::RecoveryReport& report, const synth::SynthSpec& spec,
                             const KtaeConfig& config);

}  // namespace ktae::io
