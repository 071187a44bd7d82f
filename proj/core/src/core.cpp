#include "ktae/core.hpp"

#include <string>
#include <utility>

namespace ktae {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyGroup: return "EmptyGroup";
    case Errc::EmptyRollout: return "EmptyRollout";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DomainError: return "DomainError";
    case Errc::DegenerateGroup: return "DegenerateGroup";
    case Errc::TooFewRollouts: return "TooFewRollouts";
    case Errc::Overflow: return "Overflow";
    case Errc::SpecError: return "SpecError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingTexts: return "MissingTexts";
    case Errc::UnknownGroup: return "UnknownGroup";
  }
  return "Unknown";
}

ValidatedGroup validate_group(RolloutGroup group) {
  if (group.rollouts.size() < 2) {
    throw Error(Errc::EmptyGroup, "group '" + group.group_id + "' has " +
                                      std::to_string(group.rollouts.size()) +
                                      " rollout(s), at least 2 required");
  }
  for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
    const Rollout& r = group.rollouts[i];
    if (r.tokens.empty()) {
      throw Error(Errc::EmptyRollout, "rollout " + std::to_string(i) + " has no tokens");
    }
    if (r.texts && r.texts->size() != r.tokens.size()) {
      throw Error(Errc::LengthMismatch, "rollout " + std::to_string(i) + " has " +
                                            std::to_string(r.tokens.size()) + " tokens but " +
                                            std::to_string(r.texts->size()) + " texts");
    }
  }

  ValidatedGroup out;
  out.correct_.reserve(group.rollouts.size());
  for (const Rollout& r : group.rollouts) {
    const bool correct = r.reward > group.correctness_threshold;
    out.correct_.push_back(correct ? 1 : 0);
    out.num_correct_ += correct ? 1 : 0;
  }
  out.group_ = std::move(group);
  return out;
}

}  // namespace ktae
