// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ktae/advantage.hpp"
#include "ktae/frequency.hpp"
#include "ktae/heatmap.hpp"
#include "ktae/io.hpp"
#include "ktae/oracle.hpp"
#include "ktae/pipeline.hpp"
#include "ktae/stats.hpp"
#include "ktae/synth.hpp"
#include "test_util.hpp"

using namespace ktae;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Log-space Fisher matches exact rationals for every table with N <= 16.
Outcome fisher_oracle_equivalence() {
  const auto start = Clock::now();
  const auto r = oracle::run_oracle_check(16);
  const double elapsed = seconds_since(start);
  return {r.passed() && r.tables_checked == 4844 && elapsed < 10.0,
          fmt("%lld tables, worst relative error %.2e (<= 1e-9), %.3f s (< 10 s)",
              static_cast<long long>(r.tables_checked), r.worst_relative_error, elapsed)};
}

// 2. Column-swap symmetry of p and IG; antisymmetry of D when no TF clamp fires.
Outcome symmetry_suite() {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> len(1.0, 2048.0);
  std::uniform_int_distribution<int> extra(0, 50);
  constexpr int kTables = 20000;
  const KtaeConfig cfg;
  double worst_p = 0.0, worst_ig = 0.0, worst_d = 0.0;
  int unclamped = 0;
  for (int i = 0; i < kTables; ++i) {
    const ContingencyTable t = ktae::testing::random_table(rng, 64);
    worst_p = std::max(worst_p, std::abs(stats::fisher_point_prob(t) - stats::fisher_point_prob(t.swapped())));
    worst_ig = std::max(worst_ig, std::abs(stats::info_gain(t) - stats::info_gain(t.swapped())));

    const double tf_t = t.a > 0 ? t.a + extra(rng) : 0;
    const double tf_f = t.b > 0 ? t.b + extra(rng) : 0;
    const double len_t = len(rng), len_f = len(rng), avg = 0.5 * (len_t + len_f);
    const double s_t = frequency::tf_score(tf_t, len_t, avg, cfg.k1, cfg.b);
    const double s_f = frequency::tf_score(tf_f, len_f, avg, cfg.k1, cfg.b);
    if (s_t < cfg.tf_floor || s_f < cfg.tf_floor) continue;
    ++unclamped;
    const double d = frequency::direction_score(t, s_t, s_f, cfg.h3, cfg.tf_floor);
    const double ds = frequency::direction_score(t.swapped(), s_f, s_t, cfg.h3, cfg.tf_floor);
    worst_d = std::max(worst_d, std::abs(d + ds));
  }
  return {worst_p <= 1e-12 && worst_ig <= 1e-12 && worst_d <= 1e-9 && unclamped > 1000,
          fmt("%d tables: max|dp| %.1e, max|dIG| %.1e (<= 1e-12); %d unclamped: max|D+D'| %.1e (<= 1e-9)",
              kTables, worst_p, worst_ig, unclamped, worst_d)};
}

// 3. Transform endpoints.
Outcome transform_endpoints() {
  const double at_one = stats::fisher_score(1.0);
  const double near_zero = stats::fisher_score(1e-12);
  return {at_one == 0.0 && near_zero >= 1.0 - 1e-11,
          fmt("F(1) = %g (exactly 0), F(1e-12) = %.15f (>= 1 - 1e-11)", at_one, near_zero)};
}

// 4. IG anchors.
Outcome ig_anchors() {
  const double separated = stats::info_gain({4, 0, 0, 4});
  const double independent = stats::info_gain({2, 2, 2, 2});
  return {std::abs(separated - 1.0) <= 1e-12 && std::abs(independent) <= 1e-12,
          fmt("IG(4,0,0,4) = %.15f, IG(2,2,2,2) = %.3g (within 1e-12)", separated, independent)};
}

// 5. Bounded perturbation and per-type uniformity on random groups.
Outcome bounded_perturbation() {
  std::mt19937_64 rng(5150);
  ktae::testing::GroupShape shape;
  shape.vocab = 60;
  constexpr int kGroups = 10000;
  double worst = 0.0;
  long long positions = 0, mismatches = 0, uneven = 0;
  for (int n = 0; n < kGroups; ++n) {
    const RolloutGroup g = ktae::testing::random_group(rng, shape);
    const AdvantageMatrix m = compute_advantages(g);
    for (std::size_t i = 0; i < g.rollouts.size(); ++i) {
      const double base = m.rollout_advantages[i];
      std::unordered_map<TokenId, double> seen;
      for (std::size_t t = 0; t < g.rollouts[i].tokens.size(); ++t) {
        const TokenId tok = g.rollouts[i].tokens[t];
        const double v = m.token_advantages[i][t];
        worst = std::max(worst, std::abs(v - base));
        ++positions;
        // The stored value is the rollout advantage plus the token type's
        // single delta (pulled inside the bound when the sum rounds onto it).
        double expected = base + m.stats(tok).delta;
        while (std::abs(expected - base) >= 0.5) expected = std::nextafter(expected, base);
        if (v != expected) ++mismatches;
        auto [it, fresh] = seen.emplace(tok, v - base);
        if (!fresh && it->second != v - base) ++uneven;
      }
    }
  }
  return {worst < 0.5 && mismatches == 0 && uneven == 0,
          fmt("%d groups, %lld positions: max|dA| = %.17g (< 0.5); per-type delta mismatches %lld, "
              "uneven in-rollout deltas %lld",
              kGroups, positions, worst, mismatches, uneven)};
}

// 6. Tokens present in every rollout are neutral.
Outcome neutral_tokens() {
  std::mt19937_64 rng(606);
  ktae::testing::GroupShape shape;
  shape.vocab = 6;  // small vocabulary: many tokens land in every rollout
  long long neutral = 0, violations = 0;
  for (int n = 0; n < 2000; ++n) {
    const RolloutGroup g = ktae::testing::random_group(rng, shape);
    const AdvantageMatrix m = compute_advantages(g);
    for (std::size_t i = 0; i < g.rollouts.size(); ++i) {
      for (std::size_t t = 0; t < g.rollouts[i].tokens.size(); ++t) {
        const TokenStats& s = m.stats(g.rollouts[i].tokens[t]);
        if (s.table.c != 0 || s.table.d != 0) continue;
        ++neutral;
        if (s.fisher_score != 0.0 || s.info_gain != 0.0 || s.key_token_value != 0.0 ||
            m.token_advantages[i][t] != m.rollout_advantages[i]) {
          ++violations;
        }
      }
    }
  }
  return {neutral > 0 && violations == 0,
          fmt("%lld positions with c = d = 0, %lld with non-zero delta", neutral, violations)};
}

// 7. Planted-token recovery on the default synthetic benchmark.
Outcome planted_recovery() {
  const synth::SynthSpec spec;  // 200 groups, G = 16, correct_fraction 0.75
  const KtaeConfig cfg;         // h = (1, 2, 1), k1 = 2, b = 0.5
  const auto start = Clock::now();
  const auto report = synth::recovery_report(synth::generate(spec), spec, cfg);
  const double elapsed = seconds_since(start);
  const bool ok = spec.num_groups == 200 && spec.group_size == 16 && spec.correct_fraction == 0.75 &&
                  report.sign_accuracy_positive == 1.0 && report.sign_accuracy_negative == 1.0 &&
                  report.mean_abs_ktv_plants > report.filler_abs_ktv_p95 && elapsed < 30.0;
  return {ok, fmt("sign accuracy +%.4f / -%.4f; mean|ktv| plants %.4g > filler p95 %.4g; %.2f s (< 30 s)",
                  report.sign_accuracy_positive, report.sign_accuracy_negative,
                  report.mean_abs_ktv_plants, report.filler_abs_ktv_p95, elapsed)};
}

// 8. All-correct and all-incorrect groups.
Outcome degenerate_handling() {
  std::mt19937_64 rng(808);
  bool ok = true;
  int groups = 0;
  for (double reward : {1.0, 0.0}) {
    for (int n = 0; n < 200; ++n) {
      RolloutGroup g = ktae::testing::random_group(rng);
      for (auto& r : g.rollouts) r.reward = reward;
      const ValidatedGroup v = validate_group(g);
      ok = ok && !dapo_admissible(v);
      const AdvantageMatrix m = compute_advantages(v);
      for (std::size_t i = 0; i < g.rollouts.size(); ++i) {
        ok = ok && m.rollout_advantages[i] == 0.0;
        for (double x : m.token_advantages[i]) ok = ok && x == 0.0;
      }
      ++groups;
    }
  }
  return {ok, fmt("%d degenerate groups: all inadmissible, all advantages exactly 0", groups)};
}

// 9. Throughput on G = 16 x 1024 tokens and serial/parallel byte identity.
Outcome determinism_and_throughput() {
  std::mt19937_64 rng(909);
  ktae::testing::GroupShape shape;
  shape.g_min = shape.g_max = 16;
  shape.len_min = shape.len_max = 1024;
  shape.vocab = 32000;
  RolloutGroup big = ktae::testing::random_group(rng, shape);
  big.rollouts[0].reward = 1.0;
  big.rollouts[1].reward = 0.0;
  const ValidatedGroup v = validate_group(big);

  std::vector<double> ms;
  for (int rep = 0; rep < 7; ++rep) {
    const auto start = Clock::now();
    const AdvantageMatrix m = compute_advantages(v);
    ms.push_back(seconds_since(start) * 1e3);
    if (m.token_advantages.size() != 16) return {false, "wrong shape"};
  }
  std::sort(ms.begin(), ms.end());
  const double median = ms[ms.size() / 2];

  synth::SynthSpec spec;
  spec.num_groups = 1000;
  spec.seed = 99;
  std::string input;
  for (const auto& g : synth::generate(spec)) input += io::serialize_group_record(g) + "\n";
  auto run = [&](std::size_t workers) {
    std::istringstream in(input);
    std::ostringstream out, diag;
    BatchOptions opt;
    opt.parallel = workers;
    opt.with_stats = true;
    run_batch(in, out, diag, {}, opt);
    return out.str();
  };
  const std::string serial = run(1);
  const std::string parallel = run(8);
  const bool identical = !serial.empty() && serial == parallel;
  return {median < 100.0 && identical,
          fmt("G=16 x 1024 tokens: median %.2f ms (< 100 ms); 1000-group batch serial == parallel(8): %s",
              median, identical ? "yes" : "no")};
}

// 10. Heatmap shading on a synthetic group.
Outcome visualization_contract() {
  synth::SynthSpec spec;
  spec.num_groups = 5;
  spec.seed = 1010;
  const std::unordered_set<TokenId> pos(spec.planted_positive.begin(), spec.planted_positive.end());
  const std::unordered_set<TokenId> neg(spec.planted_negative.begin(), spec.planted_negative.end());
  static const std::regex span_re(
      R"re(<span class="tok( pos| neg)?" data-token="(\d+)"(?: data-value="[^"]*" style="background-color: rgba\((\d+), (\d+), (\d+), ([^)]+)\)")?>)re");

  long long spans = 0, wrong = 0;
  for (const RolloutGroup& g : synth::generate(spec)) {
    const AdvantageMatrix m = compute_advantages(g);
    const auto rec = io::parse_advantage_record(io::serialize_advantage_record(g.group_id, m, true));
    const std::string html = render_heatmap(g, rec);
    for (auto it = std::sregex_iterator(html.begin(), html.end(), span_re); it != std::sregex_iterator(); ++it) {
      const auto& mt = *it;
      ++spans;
      const TokenId tok = std::stoll(mt[2]);
      const double ktv = m.stats(tok).key_token_value;
      const std::string cls = mt[1];
      const bool shaded = mt[3].matched;
      const bool green = shaded && mt[3] == "0" && mt[4] == "160" && mt[5] == "0";
      const bool red = shaded && mt[3] == "220" && mt[4] == "0" && mt[5] == "0";
      if (shaded && !(std::stod(mt[6]) > 0.0)) ++wrong;
      if (pos.contains(tok) && !(green && cls == " pos")) ++wrong;
      if (neg.contains(tok) && !(red && cls == " neg")) ++wrong;
      if (shaded == (ktv == 0.0)) ++wrong;
      if (shaded && (ktv > 0.0) != green) ++wrong;
    }
    std::size_t tokens = 0;
    for (const auto& r : g.rollouts) tokens += r.tokens.size();
    spans -= static_cast<long long>(tokens);  // every position must have been matched
    if (spans != 0) return {false, "token span count does not match positions"};
  }
  return {wrong == 0, fmt("5 synthetic groups: %lld mis-shaded spans", wrong)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1  Fisher oracle equivalence", fisher_oracle_equivalence},
      {"2  Column-swap symmetry", symmetry_suite},
      {"3  Fisher transform endpoints", transform_endpoints},
      {"4  Information gain anchors", ig_anchors},
      {"5  Bounded perturbation", bounded_perturbation},
      {"6  Neutral-token neutrality", neutral_tokens},
      {"7  Planted-token recovery", planted_recovery},
      {"8  Degenerate handling", degenerate_handling},
      {"9  Determinism and throughput", determinism_and_throughput},
      {"10 Visualization contract", visualization_contract},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
