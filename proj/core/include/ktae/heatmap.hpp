#pragma once

#include <string>

#include "ktae/core.hpp"
#include "ktae/io.hpp"

namespace ktae {

/// Standalone HTML page shading each token of `group` by its key-token-value:
/// green for positive, red for negative, alpha = |value| / max |value| over
/// the group. Zero-valued tokens get no background. When the record has no
/// token statistics the per-position advantage shift is used as the value.
///
/// Throws Error{MissingTexts} if a rollout has no display strings, and
/// Error{ParseError} if the record's shape does not match the group.
std::string render_heatmap(const RolloutGroup& group, const io::AdvantageRecord& record);

}  // namespace ktae
