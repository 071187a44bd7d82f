#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "ktae/config.hpp"
#include "ktae/error.hpp"

namespace ktae {

struct BatchOptions {
  std::size_t parallel = 1;
  bool with_stats = false;
  bool skip_bad = false;
  // Lines held in memory at once; bounds memory on large inputs.
  std::size_t chunk_lines = 512;
};

struct BatchFailure {
  std::int64_t line = 0;  // 1-based
  Errc code = Errc::ParseError;
  std::string message;
};

struct BatchSummary {
  std::int64_t records_read = 0;
  std::int64_t records_written = 0;
  std::int64_t records_skipped = 0;
  // Set when a bad record stopped the batch (skip_bad = false).
  std::optional<BatchFailure> failure;
};

/// Streams GroupRecord lines from `in` to AdvantageRecord lines on `out`.
///
/// Lines are read in chunks, each chunk is computed by a pool of `parallel`
/// workers, and results are written in input order, so the output is
/// byte-identical for any worker count. Blank lines are skipped. Per-record
/// diagnostics ("line N: ...") go to `diag`.
BatchSummary run_batch(std::istream& in, std::ostream& out, std::ostream& diag,
                       const KtaeConfig& config, const BatchOptions& options = {});

}  // namespace ktae
