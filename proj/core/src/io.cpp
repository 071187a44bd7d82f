#include "ktae/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ktae::io {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(Errc code, const std::string& message) { throw Error(code, message); }

json parse_object(std::string_view text, Errc code, const char* what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(code, std::string(what) + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) fail(code, std::string(what) + " must be a JSON object");
  return doc;
}

std::string read_file(const std::filesystem::path& path, Errc code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(code, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> number_array(const json& j, const char* field) {
  if (!j.is_array()) fail(Errc::ParseError, std::string(field) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& v : j) {
    if (!v.is_number()) fail(Errc::ParseError, std::string(field) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Rollout parse_rollout(const json& j, std::size_t index) {
  const std::string where = "rollouts[" + std::to_string(index) + "]";
  if (!j.is_object()) fail(Errc::ParseError, where + " must be an object");

  Rollout r;
  const auto tokens = j.find("tokens");
  if (tokens == j.end() || !tokens->is_array()) {
    fail(Errc::ParseError, where + ".tokens must be an integer array");
  }
  r.tokens.reserve(tokens->size());
  for (const json& t : *tokens) {
    if (!t.is_number_integer() || t.get<std::int64_t>() < 0) {
      fail(Errc::ParseError, where + ".tokens must hold non-negative integers");
    }
    r.tokens.push_back(t.get<TokenId>());
  }

  const auto reward = j.find("reward");
  if (reward == j.end() || !reward->is_number()) {
    fail(Errc::ParseError, where + ".reward must be a number");
  }
  r.reward = reward->get<double>();

  const auto texts = j.find("texts");
  if (texts != j.end() && !texts->is_null()) {
    if (!texts->is_array()) fail(Errc::ParseError, where + ".texts must be a string array");
    std::vector<std::string> out;
    out.reserve(texts->size());
    for (const json& t : *texts) {
      if (!t.is_string()) fail(Errc::ParseError, where + ".texts must hold strings");
      out.push_back(t.get<std::string>());
    }
    r.texts = std::move(out);
  }
  return r;
}

template <typename T>
T get_as(const json& doc, const std::string& key, Errc code) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    fail(code, "field '" + key + "' has the wrong type");
  }
}

double get_number(const json& doc, const std::string& key, Errc code) {
  if (!doc.at(key).is_number()) fail(code, "field '" + key + "' must be a number");
  return doc.at(key).get<double>();
}

std::int64_t get_integer(const json& doc, const std::string& key, Errc code) {
  if (!doc.at(key).is_number_integer()) fail(code, "field '" + key + "' must be an integer");
  return doc.at(key).get<std::int64_t>();
}

std::vector<TokenId> get_token_list(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_array()) fail(Errc::SpecError, "field '" + key + "' must be an integer array");
  std::vector<TokenId> out;
  for (const json& t : v) {
    if (!t.is_number_integer()) fail(Errc::SpecError, "field '" + key + "' must hold integers");
    out.push_back(t.get<TokenId>());
  }
  return out;
}

}  // namespace

RolloutGroup parse_group_record(std::string_view line) {
  const json doc = parse_object(line, Errc::ParseError, "group record");
  RolloutGroup group;

  const auto id = doc.find("group_id");
  if (id == doc.end()) fail(Errc::ParseError, "group record is missing group_id");
  if (id->is_string()) {
    group.group_id = id->get<std::string>();
  } else if (id->is_number_integer()) {
    group.group_id = id->dump();
  } else {
    fail(Errc::ParseError, "group_id must be a string");
  }

  const auto threshold = doc.find("correctness_threshold");
  if (threshold != doc.end()) {
    if (!threshold->is_number()) fail(Errc::ParseError, "correctness_threshold must be a number");
    group.correctness_threshold = threshold->get<double>();
  }

  const auto rollouts = doc.find("rollouts");
  if (rollouts == doc.end() || !rollouts->is_array()) {
    fail(Errc::ParseError, "group record needs a rollouts array");
  }
  group.rollouts.reserve(rollouts->size());
  for (std::size_t i = 0; i < rollouts->size(); ++i) {
    group.rollouts.push_back(parse_rollout((*rollouts)[i], i));
  }
  return group;
}

std::string serialize_group_record(const RolloutGroup& group) {
  ordered_json doc;
  doc["group_id"] = group.group_id;
  doc["correctness_threshold"] = group.correctness_threshold;
  ordered_json rollouts = ordered_json::array();
  for (const Rollout& r : group.rollouts) {
    ordered_json jr;
    jr["tokens"] = r.tokens;
    jr["reward"] = r.reward;
    if (r.texts) jr["texts"] = *r.texts;
    rollouts.push_back(std::move(jr));
  }
  doc["rollouts"] = std::move(rollouts);
  return doc.dump();
}

std::string serialize_advantage_record(std::string_view group_id, const AdvantageMatrix& matrix,
                                       bool with_stats) {
  ordered_json doc;
  doc["group_id"] = std::string(group_id);
  doc["rollout_advantages"] = matrix.rollout_advantages;
  doc["token_advantages"] = matrix.token_advantages;
  if (with_stats) {
    ordered_json table = ordered_json::object();
    for (const auto& [token, s] : matrix.token_stats) {
      ordered_json row;
      row["a"] = s.table.a;
      row["b"] = s.table.b;
      row["c"] = s.table.c;
      row["d"] = s.table.d;
      row["p"] = s.fisher_p;
      row["F"] = s.fisher_score;
      row["IG"] = s.info_gain;
      row["TF_T"] = s.tf_score_true;
      row["TF_F"] = s.tf_score_false;
      row["D"] = s.direction;
      row["ktv"] = s.key_token_value;
      table[std::to_string(token)] = std::move(row);
    }
    doc["token_stats"] = std::move(table);
  }
  return doc.dump();
}

AdvantageRecord parse_advantage_record(std::string_view line) {
  const json doc = parse_object(line, Errc::ParseError, "advantage record");
  AdvantageRecord rec;
  try {
    const json& id = doc.at("group_id");
    rec.group_id = id.is_string() ? id.get<std::string>() : id.dump();
    rec.rollout_advantages = number_array(doc.at("rollout_advantages"), "rollout_advantages");
    const json& rows = doc.at("token_advantages");
    if (!rows.is_array()) fail(Errc::ParseError, "token_advantages must be an array");
    for (const json& row : rows) rec.token_advantages.push_back(number_array(row, "token_advantages"));

    const auto stats = doc.find("token_stats");
    if (stats != doc.end()) {
      if (!stats->is_object()) fail(Errc::ParseError, "token_stats must be an object");
      for (const auto& [key, row] : stats->items()) {
        TokenStats s;
        s.token = std::stoll(key);
        s.table = {row.at("a").get<std::int64_t>(), row.at("b").get<std::int64_t>(),
                   row.at("c").get<std::int64_t>(), row.at("d").get<std::int64_t>()};
        s.fisher_p = row.at("p").get<double>();
        s.fisher_score = row.at("F").get<double>();
        s.info_gain = row.at("IG").get<double>();
        s.tf_score_true = row.at("TF_T").get<double>();
        s.tf_score_false = row.at("TF_F").get<double>();
        s.direction = row.at("D").get<double>();
        s.key_token_value = row.at("ktv").get<double>();
        rec.token_stats.emplace(s.token, s);
      }
    }
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("malformed advantage record: ") + e.what());
  } catch (const std::logic_error& e) {
    fail(Errc::ParseError, std::string("malformed token_stats key: ") + e.what());
  }
  return rec;
}

KtaeConfig parse_config(std::string_view text, KtaeConfig base) {
  const json doc = parse_object(text, Errc::ConfigError, "config");
  KtaeConfig c = base;
  for (const auto& [key, value] : doc.items()) {
    if (key == "h1") c.h1 = get_number(doc, key, Errc::ConfigError);
    else if (key == "h2") c.h2 = get_number(doc, key, Errc::ConfigError);
    else if (key == "h3") c.h3 = get_number(doc, key, Errc::ConfigError);
    else if (key == "k1") c.k1 = get_number(doc, key, Errc::ConfigError);
    else if (key == "b") c.b = get_number(doc, key, Errc::ConfigError);
    else if (key == "std_epsilon") c.std_epsilon = get_number(doc, key, Errc::ConfigError);
    else if (key == "tf_floor") c.tf_floor = get_number(doc, key, Errc::ConfigError);
    else if (key == "fisher_mode")
      c.fisher_mode = parse_fisher_mode(get_as<std::string>(doc, key, Errc::ConfigError));
    else if (key == "degenerate_policy")
      c.degenerate_policy =
          parse_degenerate_policy(get_as<std::string>(doc, key, Errc::ConfigError));
    else fail(Errc::ConfigError, "unknown config field '" + key + "'");
  }
  validate(c);
  return c;
}

std::string serialize_config(const KtaeConfig& c) {
  ordered_json doc;
  doc["h1"] = c.h1;
  doc["h2"] = c.h2;
  doc["h3"] = c.h3;
  doc["k1"] = c.k1;
  doc["b"] = c.b;
  doc["std_epsilon"] = c.std_epsilon;
  doc["tf_floor"] = c.tf_floor;
  doc["fisher_mode"] = std::string(to_string(c.fisher_mode));
  doc["degenerate_policy"] = std::string(to_string(c.degenerate_policy));
  return doc.dump(2);
}

KtaeConfig load_config(const std::filesystem::path& path, KtaeConfig base) {
  return parse_config(read_file(path, Errc::ConfigError), base);
}

synth::SynthSpec parse_synth_spec(std::string_view text) {
  const json doc = parse_object(text, Errc::SpecError, "synth spec");
  synth::SynthSpec s;
  for (const auto& [key, value] : doc.items()) {
    if (key == "seed") s.seed = static_cast<std::uint64_t>(get_integer(doc, key, Errc::SpecError));
    else if (key == "num_groups") s.num_groups = get_integer(doc, key, Errc::SpecError);
    else if (key == "G") s.group_size = get_integer(doc, key, Errc::SpecError);
    else if (key == "correct_fraction") s.correct_fraction = get_number(doc, key, Errc::SpecError);
    else if (key == "base_vocab") s.base_vocab = get_integer(doc, key, Errc::SpecError);
    else if (key == "rollout_len_range") {
      if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
          !value[1].is_number_integer()) {
        fail(Errc::SpecError, "rollout_len_range must be [min, max]");
      }
      s.min_len = value[0].get<std::int64_t>();
      s.max_len = value[1].get<std::int64_t>();
    }
    else if (key == "planted_positive") s.planted_positive = get_token_list(doc, key);
    else if (key == "planted_negative") s.planted_negative = get_token_list(doc, key);
    else if (key == "planted_neutral") s.planted_neutral = get_token_list(doc, key);
    else fail(Errc::SpecError, "unknown synth spec field '" + key + "'");
  }
  synth::validate(s);
  return s;
}

std::string serialize_synth_spec(const synth::SynthSpec& s) {
  ordered_json doc;
  doc["seed"] = s.seed;
  doc["num_groups"] = s.num_groups;
  doc["G"] = s.group_size;
  doc["correct_fraction"] = s.correct_fraction;
  doc["base_vocab"] = s.base_vocab;
  doc["rollout_len_range"] = {s.min_len, s.max_len};
  doc["planted_positive"] = s.planted_positive;
  doc["planted_negative"] = s.planted_negative;
  doc["planted_neutral"] = s.planted_neutral;
  return doc.dump(2);
}

synth::SynthSpec load_synth_spec(const std::filesystem::path& path) {
  return parse_synth_spec(read_file(path, Errc::SpecError));
}

std::string serialize_report(const synth::RecoveryReport& r, const synth::SynthSpec& spec,
                             const KtaeConfig& config) {
  ordered_json doc;
  doc["groups"] = r.groups;
  doc["sign_accuracy"] = r.sign_accuracy;
  doc["sign_accuracy_positive"] = r.sign_accuracy_positive;
  doc["sign_accuracy_negative"] = r.sign_accuracy_negative;
  doc["positive_checked"] = r.positive_checked;
  doc["negative_checked"] = r.negative_checked;
  doc["neutral_max_abs_delta"] = r.neutral_max_abs_delta;
  doc["mean_abs_delta_plants"] = r.mean_abs_delta_plants;
  doc["mean_abs_delta_filler"] = r.mean_abs_delta_filler;
  doc["mean_abs_ktv_plants"] = r.mean_abs_ktv_plants;
  doc["filler_abs_ktv_p95"] = r.filler_abs_ktv_p95;
  ordered_json ranks = ordered_json::array();
  for (const auto& pr : r.plant_ranks) {
    ranks.push_back({{"token", pr.token}, {"mean_rank", pr.mean_rank}, {"worst_rank", pr.worst_rank}});
  }
  doc["plant_ranks"] = std::move(ranks);
  doc["spec"] = ordered_json::parse(serialize_synth_spec(spec));
  doc["config"] = ordered_json::parse(serialize_config(config));

  double total = 0.0;
  double worst = 0.0;
  for (double ms : r.group_millis) {
    total += ms;
    worst = std::max(worst, ms);
  }
  ordered_json timing;
  timing["total_ms"] = total;
  timing["mean_ms_per_group"] = r.group_millis.empty() ? 0.0 : total / static_cast<double>(r.group_millis.size());
  timing["max_ms_per_group"] = worst;
  timing["per_group_ms"] = r.group_millis;
  doc["timing"] = std::move(timing);
  return doc.dump(2);
}

}  // namespace ktae::io
