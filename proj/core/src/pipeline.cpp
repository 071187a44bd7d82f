#include "ktae/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <istream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "ktae/advantage.hpp"
#include "ktae/io.hpp"

namespace ktae {
namespace {

struct Slot {
  std::int64_t line = 0;
  std::string input;
  std::string output;
  std::optional<BatchFailure> error;
};

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch) != 0; });
}

void process(Slot& slot, const KtaeConfig& config, bool with_stats) {
  try {
    RolloutGroup group = io::parse_group_record(slot.input);
    std::string id = group.group_id;
    const AdvantageMatrix m = compute_advantages(validate_group(std::move(group)), config);
    slot.output = io::serialize_advantage_record(id, m, with_stats);
  } catch (const Error& e) {
    slot.error = BatchFailure{slot.line, e.code(), e.what()};
  } catch (const std::exception& e) {
    slot.error = BatchFailure{slot.line, Errc::ParseError, e.what()};
  }
  slot.input.clear();
  slot.input.shrink_to_fit();
}

void run_chunk(std::vector<Slot>& chunk, const KtaeConfig& config, const BatchOptions& options) {
  const std::size_t workers = std::clamp<std::size_t>(options.parallel, 1, chunk.size());
  if (workers <= 1) {
    for (Slot& s : chunk) process(s, config, options.with_stats);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < chunk.size(); i = next.fetch_add(1)) {
        process(chunk[i], config, options.with_stats);
      }
    });
  }
}

}  // namespace

BatchSummary run_batch(std::istream& in, std::ostream& out, std::ostream& diag,
                       const KtaeConfig& config, const BatchOptions& options) {
  validate(config);
  const std::size_t chunk_lines = std::max<std::size_t>(options.chunk_lines, 1);

  BatchSummary summary;
  std::int64_t line_no = 0;
  std::string line;
  std::vector<Slot> chunk;
  bool eof = false;

  while (!eof) {
    chunk.clear();
    while (chunk.size() < chunk_lines) {
      if (!std::getline(in, line)) {
        eof = true;
        break;
      }
      ++line_no;
      if (blank(line)) continue;
      chunk.push_back(Slot{line_no, std::move(line), {}, {}});
      line.clear();
    }
    if (chunk.empty()) break;
    summary.records_read += static_cast<std::int64_t>(chunk.size());

    run_chunk(chunk, config, options);

    for (Slot& s : chunk) {
      if (s.error) {
        diag << "line " << s.error->line << ": " << s.error->message << '\n';
        if (!options.skip_bad) {
          summary.failure = std::move(s.error);
          out.flush();
          return summary;
        }
        ++summary.records_skipped;
        continue;
      }
      out << s.output << '\n';
      ++summary.records_written;
    }
  }
  out.flush();
  return summary;
}

}  // namespace ktae
