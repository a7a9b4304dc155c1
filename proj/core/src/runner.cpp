#include "pogosim/runner.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pogosim/world.hpp"

namespace pogosim {

void write_summary_records(RecordSink& sink, const std::vector<MetricRow>& summary) {
  for (const MetricRow& row : summary) {
    sink.write({row.tick, RecordKind::metric, 0, {{"name", row.name}, {"value", canonical_number(row.value)}},
                Phase::metrics});
  }
}

RunResult run_headless(const ScenarioConfig& config, const RunOptions& options, const ProgramRegistry& registry) {
  WorldConfig world_config = config.world;
  if (options.seed) world_config.seed = *options.seed;

  std::uint64_t ticks = config.duration_ticks();
  if (options.until) {
    if (!(*options.until >= 0.0)) throw std::invalid_argument("--until must be non-negative");
    ticks = static_cast<std::uint64_t>(std::llround(*options.until * 1e9 / static_cast<double>(world_config.dt_ns)));
  }

  TraceWriter writer(options.trace, config.trace_kinds);
  MetricsAccumulator metrics;
  TeeSink tee;
  tee.add(&writer);
  tee.add(&metrics);
  if (options.observer != nullptr) tee.add(options.observer);

  World world(std::move(world_config), registry, &tee);
  std::vector<IssuedCommand> due;
  std::size_t next_script = 0;
  for (std::uint64_t k = 0; k < ticks; ++k) {
    due.clear();
    while (next_script < config.script.size() && config.script[next_script].tick <= k) {
      due.push_back(config.script[next_script++].command);
    }
    world.step(due);
  }

  RunResult result;
  result.ticks = ticks;
  result.metrics = ticks > 0 ? metrics.finish(ticks - 1) : metrics.finish();
  if (ticks > 0) write_summary_records(writer, metrics.summary());
  result.digest = writer.digest().hex();
  result.trace_lines = writer.lines();

  if (options.trace != nullptr) {
    options.trace->flush();
    if (!*options.trace) throw std::runtime_error("failed writing trace");
  }
  if (options.metrics != nullptr) {
    write_metrics_csv(*options.metrics, result.metrics);
    options.metrics->flush();
    if (!*options.metrics) throw std::runtime_error("failed writing metrics");
  }
  return result;
}

}  // namespace pogosim
