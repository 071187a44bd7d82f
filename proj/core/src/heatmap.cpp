#include "ktae/heatmap.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ktae {
namespace {

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string format_number(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

constexpr const char* kStyle = R"(body { font-family: sans-serif; margin: 2em; }
.rollout { margin-bottom: 1.5em; border-top: 1px solid #ccc; padding-top: 0.5em; }
.meta { font-size: 0.9em; color: #444; margin-bottom: 0.3em; }
.tokens { font-family: monospace; white-space: pre-wrap; line-height: 1.6; }
.tok { border-radius: 2px; }
.legend span { padding: 0 0.4em; margin-right: 1em; }
)";

}  // namespace

std::string render_heatmap(const RolloutGroup& group, const io::AdvantageRecord& record) {
  if (record.token_advantages.size() != group.rollouts.size() ||
      record.rollout_advantages.size() != group.rollouts.size()) {
    throw Error(Errc::ParseError, "advantage record for '" + record.group_id +
                                      "' does not match the group's rollout count");
  }
  for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
    const Rollout& r = group.rollouts[i];
    if (!r.texts) {
      throw Error(Errc::MissingTexts, "group '" + group.group_id + "' rollout " +
                                          std::to_string(i) + " has no display texts");
    }
    if (record.token_advantages[i].size() != r.tokens.size() || r.texts->size() != r.tokens.size()) {
      throw Error(Errc::ParseError, "advantage record for '" + record.group_id +
                                        "' does not match rollout " + std::to_string(i) + " length");
    }
  }

  const bool use_stats = !record.token_stats.empty();
  auto value_at = [&](std::size_t i, std::size_t t) {
    if (use_stats) {
      const auto it = record.token_stats.find(group.rollouts[i].tokens[t]);
      if (it == record.token_stats.end()) {
        throw Error(Errc::ParseError, "token_stats has no entry for token " +
                                          std::to_string(group.rollouts[i].tokens[t]));
      }
      return it->second.key_token_value;
    }
    return record.token_advantages[i][t] - record.rollout_advantages[i];
  };

  double max_abs = 0.0;
  for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
    for (std::size_t t = 0; t < group.rollouts[i].tokens.size(); ++t) {
      max_abs = std::max(max_abs, std::abs(value_at(i, t)));
    }
  }

  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\" />\n"
       << "<title>Key-token heatmap: " << escape(group.group_id) << "</title>\n"
       << "<style>\n" << kStyle << "</style>\n</head>\n<body>\n"
       << "<h1>Group " << escape(group.group_id) << "</h1>\n"
       << "<p class=\"legend\"><span style=\"background-color: rgba(0, 160, 0, 0.6)\">positive</span>"
       << "<span style=\"background-color: rgba(220, 0, 0, 0.6)\">negative</span>"
       << "value: " << (use_stats ? "key-token-value" : "advantage shift")
       << ", max |value| = " << format_number(max_abs) << "</p>\n";

  for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
    const Rollout& r = group.rollouts[i];
    html << "<div class=\"rollout\" id=\"rollout-" << i << "\">\n"
         << "<div class=\"meta\">rollout " << i << " | reward " << format_number(r.reward)
         << " | GRPO advantage " << format_number(record.rollout_advantages[i]) << "</div>\n"
         << "<div class=\"tokens\">";
    for (std::size_t t = 0; t < r.tokens.size(); ++t) {
      const double v = value_at(i, t);
      const std::string text = escape((*r.texts)[t]);
      if (v == 0.0) {
        html << "<span class=\"tok\" data-token=\"" << r.tokens[t] << "\">" << text << "</span>";
        continue;
      }
      const double alpha = std::abs(v) / max_abs;
      const char* rgb = v > 0.0 ? "0, 160, 0" : "220, 0, 0";
      html << "<span class=\"tok " << (v > 0.0 ? "pos" : "neg") << "\" data-token=\"" << r.tokens[t]
           << "\" data-value=\"" << format_number(v, "%.17g")
           << "\" style=\"background-color: rgba(" << rgb << ", " << format_number(alpha) << ")\">"
           << text << "</span>";
    }
    html << "</div>\n</div>\n";
  }
  html << "</body>\n</html>\n";
  return html.str();
}

}  // namespace ktae
