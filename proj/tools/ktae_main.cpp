// ktae: batch key-token advantage estimation, heatmaps, synthetic recovery
// benchmarks and the exact-arithmetic Fisher check.
//
// Exit codes: 0 success, 1 data error, 2 config or usage error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ktae/heatmap.hpp"
#include "ktae/io.hpp"
#include "ktae/oracle.hpp"
#include "ktae/pipeline.hpp"
#include "ktae/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitConfig = 2;

struct ConfigFlags {
  std::string path;
  std::optional<double> h1, h2, h3, k1, b, std_epsilon, tf_floor;
  std::optional<std::string> fisher_mode, degenerate_policy;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", path, "Flat JSON config; missing fields keep defaults");
    cmd->add_option("--h1", h1, "Fisher score weight");
    cmd->add_option("--h2", h2, "Information gain weight");
    cmd->add_option("--h3", h3, "TF ratio weight in the direction score");
    cmd->add_option("--k1", k1, "TF saturation parameter");
    cmd->add_option("--b", b, "TF length normalization");
    cmd->add_option("--std-epsilon", std_epsilon, "Zero-variance guard");
    cmd->add_option("--tf-floor", tf_floor, "Lower clamp on TF scores");
    cmd->add_option("--fisher-mode", fisher_mode, "point | two_sided");
    cmd->add_option("--degenerate-policy", degenerate_policy, "zeros | error");
  }

  // Defaults, then the file, then flags.
  ktae::KtaeConfig resolve() const {
    ktae::KtaeConfig c;
    if (!path.empty()) c = ktae::io::load_config(path);
    if (h1) c.h1 = *h1;
    if (h2) c.h2 = *h2;
    if (h3) c.h3 = *h3;
    if (k1) c.k1 = *k1;
    if (b) c.b = *b;
    if (std_epsilon) c.std_epsilon = *std_epsilon;
    if (tf_floor) c.tf_floor = *tf_floor;
    if (fisher_mode) c.fisher_mode = ktae::parse_fisher_mode(*fisher_mode);
    if (degenerate_policy) c.degenerate_policy = ktae::parse_degenerate_policy(*degenerate_policy);
    ktae::validate(c);
    return c;
  }
};

int exit_code_for(ktae::Errc code) {
  switch (code) {
    case ktae::Errc::ConfigError:
    case ktae::Errc::SpecError:
      return kExitConfig;
    default:
      return kExitData;
  }
}

struct ComputeArgs {
  std::string input = "-";
  std::string output = "-";
  bool stats = false;
  bool skip_bad = false;
  std::size_t parallel = 1;
  ConfigFlags config;
};

int run_compute(const ComputeArgs& args) {
  const ktae::KtaeConfig config = args.config.resolve();

  std::ifstream in_file;
  std::istream* in = &std::cin;
  if (args.input != "-") {
    in_file.open(args.input, std::ios::binary);
    if (!in_file) {
      std::cerr << "error: cannot open input '" << args.input << "'\n";
      return kExitData;
    }
    in = &in_file;
  }
  std::ofstream out_file;
  std::ostream* out = &std::cout;
  if (args.output != "-") {
    out_file.open(args.output, std::ios::binary | std::ios::trunc);
    if (!out_file) {
      std::cerr << "error: cannot open output '" << args.output << "'\n";
      return kExitData;
    }
    out = &out_file;
  }

  ktae::BatchOptions options;
  options.parallel = args.parallel;
  options.with_stats = args.stats;
  options.skip_bad = args.skip_bad;
  const ktae::BatchSummary summary = ktae::run_batch(*in, *out, std::cerr, config, options);
  if (summary.failure) return kExitData;
  if (summary.records_skipped > 0) {
    std::cerr << "skipped " << summary.records_skipped << " bad record(s)\n";
  }
  return kExitOk;
}

struct VisualizeArgs {
  std::string input;
  std::string advantages;
  std::string group;
  std::string output;
};

template <typename Record, typename Parse>
std::optional<Record> find_record(const std::string& path, const std::string& group_id,
                                  Parse parse) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ktae::Error(ktae::Errc::ParseError, "cannot open '" + path + "'");
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      Record rec = parse(line);
      if (rec.group_id == group_id) return rec;
    } catch (const ktae::Error& e) {
      throw ktae::Error(e.code(), path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return std::nullopt;
}

int run_visualize(const VisualizeArgs& args) {
  auto group = find_record<ktae::RolloutGroup>(args.input, args.group, ktae::io::parse_group_record);
  if (!group) throw ktae::Error(ktae::Errc::UnknownGroup, "no group '" + args.group + "' in " + args.input);
  auto record = find_record<ktae::io::AdvantageRecord>(args.advantages, args.group,
                                                       ktae::io::parse_advantage_record);
  if (!record) {
    throw ktae::Error(ktae::Errc::UnknownGroup, "no group '" + args.group + "' in " + args.advantages);
  }
  const std::string html = ktae::render_heatmap(*group, *record);
  std::ofstream out(args.output, std::ios::binary | std::ios::trunc);
  if (!out) throw ktae::Error(ktae::Errc::ParseError, "cannot open output '" + args.output + "'");
  out << html;
  return kExitOk;
}

struct BenchArgs {
  std::string spec;
  std::string report;
  ConfigFlags config;
};

int run_bench(const BenchArgs& args) {
  const ktae::KtaeConfig config = args.config.resolve();
  const ktae::synth::SynthSpec spec =
      args.spec.empty() ? ktae::synth::SynthSpec{} : ktae::io::load_synth_spec(args.spec);
  ktae::synth::validate(spec);

  const auto start = std::chrono::steady_clock::now();
  const auto groups = ktae::synth::generate(spec);
  const auto report = ktae::synth::recovery_report(groups, spec, config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!args.report.empty()) {
    std::ofstream out(args.report, std::ios::binary | std::ios::trunc);
    if (!out) throw ktae::Error(ktae::Errc::ParseError, "cannot open report '" + args.report + "'");
    out << ktae::io::serialize_report(report, spec, config) << '\n';
  }

  std::printf("groups                   %lld (G = %lld, %lld correct)\n",
              static_cast<long long>(report.groups), static_cast<long long>(spec.group_size),
              static_cast<long long>(ktae::synth::correct_count(spec)));
  std::printf("sign accuracy            %.4f (positive %.4f, negative %.4f)\n", report.sign_accuracy,
              report.sign_accuracy_positive, report.sign_accuracy_negative);
  std::printf("neutral max |delta|      %.3g\n", report.neutral_max_abs_delta);
  std::printf("mean |delta| plants      %.6f\n", report.mean_abs_delta_plants);
  std::printf("mean |delta| filler      %.6f\n", report.mean_abs_delta_filler);
  std::printf("mean |ktv| plants        %.6g\n", report.mean_abs_ktv_plants);
  std::printf("filler |ktv| p95         %.6g\n", report.filler_abs_ktv_p95);
  for (const auto& pr : report.plant_ranks) {
    std::printf("plant %-8lld mean rank %.2f, worst %lld\n", static_cast<long long>(pr.token),
                pr.mean_rank, static_cast<long long>(pr.worst_rank));
  }
  std::printf("wall clock               %.3f s\n", seconds);
  return kExitOk;
}

struct OracleArgs {
  std::int64_t max_n = 16;
  std::int64_t perturb_n = -1;
  double perturb_delta = 1e-6;
};

int run_oracle_check(const OracleArgs& args) {
  if (args.max_n < 0 || args.max_n > ktae::oracle::kMaxOracleN) {
    std::cerr << "error: --max-n must lie in [0, " << ktae::oracle::kMaxOracleN << "]\n";
    return kExitConfig;
  }
  const auto& shared = ktae::stats::LogGammaTable::shared();
  const ktae::stats::LogGammaTable table =
      args.perturb_n >= 0 ? shared.perturbed(args.perturb_n, args.perturb_delta) : shared;

  const auto result = ktae::oracle::run_oracle_check(args.max_n, table);
  std::printf("tables checked        %lld (N <= %lld)\n",
              static_cast<long long>(result.tables_checked), static_cast<long long>(args.max_n));
  std::printf("worst relative error  %.3e at (%lld, %lld, %lld, %lld)\n", result.worst_relative_error,
              static_cast<long long>(result.worst_table.a), static_cast<long long>(result.worst_table.b),
              static_cast<long long>(result.worst_table.c), static_cast<long long>(result.worst_table.d));
  if (!result.passed()) {
    const auto& t = *result.counterexample;
    std::printf("FAIL: table (a=%lld, b=%lld, c=%lld, d=%lld) relative error %.3e exceeds %.0e\n",
                static_cast<long long>(t.a), static_cast<long long>(t.b), static_cast<long long>(t.c),
                static_cast<long long>(t.d), result.counterexample_error, ktae::oracle::kOracleTolerance);
    return kExitData;
  }
  std::printf("PASS (tolerance %.0e)\n", ktae::oracle::kOracleTolerance);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key-token advantage estimation for grouped RL rollouts"};
  app.require_subcommand(1);

  ComputeArgs compute;
  auto* compute_cmd = app.add_subcommand("compute", "Token-level advantages for line-delimited groups");
  compute_cmd->add_option("--input", compute.input, "GroupRecord lines ('-' for stdin)");
  compute_cmd->add_option("--output", compute.output, "AdvantageRecord lines ('-' for stdout)");
  compute_cmd->add_flag("--stats", compute.stats, "Include per-token statistics");
  compute_cmd->add_option("--parallel", compute.parallel, "Worker threads")->check(CLI::PositiveNumber);
  compute_cmd->add_flag("--skip-bad", compute.skip_bad, "Report and skip malformed records");
  compute.config.attach(compute_cmd);

  VisualizeArgs visualize;
  auto* vis_cmd = app.add_subcommand("visualize", "Render one group as an HTML heatmap");
  vis_cmd->add_option("--input", visualize.input, "GroupRecord lines")->required();
  vis_cmd->add_option("--advantages", visualize.advantages, "AdvantageRecord lines")->required();
  vis_cmd->add_option("--group", visualize.group, "group_id to render")->required();
  vis_cmd->add_option("--output", visualize.output, "HTML output path")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Planted-token recovery benchmark");
  bench_cmd->add_option("--spec", bench.spec, "Synth spec (defaults: 200 groups, G = 16)");
  bench_cmd->add_option("--report", bench.report, "JSON report path");
  bench.config.attach(bench_cmd);

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare fast Fisher against exact arithmetic");
  oracle_cmd->add_option("--max-n", oracle.max_n, "Largest table total to enumerate");
  oracle_cmd->add_option("--perturb-lgamma", oracle.perturb_n, "Corrupt ln(n!) for this n (harness self-test)")
      ->group("");
  oracle_cmd->add_option("--perturb-delta", oracle.perturb_delta)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*compute_cmd) return run_compute(compute);
    if (*vis_cmd) return run_visualize(visualize);
    if (*bench_cmd) return run_bench(bench);
    if (*oracle_cmd) return run_oracle_check(oracle);
  } catch (const ktae::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}
