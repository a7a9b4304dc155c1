#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pogosim/metrics.hpp"
#include "pogosim/scenario.hpp"

namespace pogosim {

struct RunOptions {
  std::optional<std::uint64_t> seed;   // overrides the scenario seed
  std::optional<double> until;         // seconds; overrides the scenario duration
  std::ostream* trace = nullptr;       // JSON Lines output, may be null
  std::ostream* metrics = nullptr;     // CSV output, may be null
  RecordSink* observer = nullptr;      // receives every record before filtering
};

struct RunResult {
  std::uint64_t ticks = 0;
  std::string digest;        // hex FNV-1a over the written trace bytes
  std::uint64_t trace_lines = 0;
  std::vector<MetricRow> metrics;
};

/// Steps the scenario to completion as fast as possible.
RunResult run_headless(const ScenarioConfig& config, const RunOptions& options = {},
                       const ProgramRegistry& registry = ProgramRegistry::with_builtins());

/// Writes end-of-run metric rows as trace records at their tick.
void write_summary_records(RecordSink& sink, const std::vector<MetricRow>& summary);

}  // namespace pogosim
