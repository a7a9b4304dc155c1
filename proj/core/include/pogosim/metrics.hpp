#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pogosim/trace.hpp"

namespace pogosim {

struct MetricRow {
  std::string name;
  std::uint64_t tick = 0;
  double value = 0.0;
  bool operator==(const MetricRow&) const = default;
};

/// Hop distances from the seed robots over the directed reachability graph
/// described by a meta record; 255 where unreachable. Keyed by robot id.
std::map<EntityId, std::uint8_t> hop_oracle(const Json& meta);

/// Derives metric rows from a record stream. Fed identically by a live run
/// and by a trace read back from disk.
///
/// Rows: delivered_frames and dropped_frames for every tick,
/// mean_neighbor_count on sample ticks (distinct robot senders heard in the
/// trailing 1 s, averaged over robots), and at the end total_delivered,
/// total_dropped and, when hop_gradient robots exist, hop_convergence_tick
/// (-1 if never reached).
class MetricsAccumulator final : public RecordSink {
 public:
  MetricsAccumulator() = default;

  void write(const TraceRecord& record) override;
  /// Closes every tick up to and including `last_tick` and appends the summary rows.
  std::vector<MetricRow> finish(std::optional<std::uint64_t> last_tick = std::nullopt);

  /// End-of-run rows of the last finish(), for embedding in a trace.
  const std::vector<MetricRow>& summary() const { return summary_; }

 private:
  void configure(const Json& meta);
  void close_ticks_before(std::uint64_t tick);
  void close_tick(std::uint64_t tick);
  bool hops_converged() const;
  void observe_hop(const TraceRecord& record);

  bool configured_ = false;
  std::int64_t sample_period_ = 100;
  std::uint64_t window_ticks_ = 1000;
  std::vector<EntityId> robot_ids_;
  std::map<EntityId, std::uint8_t> hop_expected_;
  std::map<EntityId, std::uint8_t> hop_seen_;
  std::optional<std::uint64_t> hop_converged_at_;
  bool hop_dirty_ = false;

  std::optional<std::uint64_t> open_tick_;
  std::uint64_t next_tick_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t total_delivered_ = 0;
  std::uint64_t total_dropped_ = 0;

  std::map<std::pair<EntityId, EntityId>, std::uint64_t> edge_last_;
  std::deque<std::pair<std::uint64_t, std::pair<EntityId, EntityId>>> edge_events_;

  std::size_t active_edges_ = 0;

  std::vector<MetricRow> rows_;
  std::vector<MetricRow> summary_;
};

/// Metrics of a complete trace. Metric records in the trace are ignored
/// except for the tick they carry.
std::vector<MetricRow> compute_metrics(const std::vector<TraceRecord>& records);

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);

}  // namespace pogosim
