#include "pogosim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

#include "pogosim/demos.hpp"
#include "pogosim/ir.hpp"

namespace pogosim {

namespace {

constexpr std::string_view kHopProgram = "hop_gradient";

Pose2D pose_from_meta(const Json& arr) {
  return {arr.at(0).get<double>(), arr.at(1).get<double>(), arr.size() > 2 ? arr.at(2).get<double>() : 0.0};
}

Vec2 point_from_meta(const Json& arr) { return {arr.at(0).get<double>(), arr.at(1).get<double>()}; }

ChannelParams channel_from_meta(const Json& meta) {
  ChannelParams ch;
  const Json& c = meta.at("channel");
  ch.range = c.at("range").get<double>();
  ch.tx_half_angle = c.at("tx_half_angle").get<double>();
  ch.rx_half_angle = c.at("rx_half_angle").get<double>();
  ch.bitrate = c.at("bitrate").get<double>();
  ch.header_bytes = c.at("header_bytes").get<std::uint32_t>();
  ch.collision_policy = collision_policy_from_string(c.at("collision_policy").get<std::string>());
  return ch;
}

std::optional<std::vector<std::uint8_t>> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

bool is_hop_robot(const Json& robot) { return robot.at("program").get<std::string>() == kHopProgram; }

bool is_seed(const Json& robot) {
  const Json& params = robot.at("params");
  return params.contains("seed") && params.at("seed").get<double>() != 0.0;
}

}  // namespace

std::map<EntityId, std::uint8_t> hop_oracle(const Json& meta) {
  const ChannelParams ch = channel_from_meta(meta);
  std::vector<BodyDisc> discs;
  std::vector<std::size_t> nodes;  // indices into discs of hop robots
  std::vector<bool> seed;
  for (const Json& r : meta.at("robots")) {
    if (is_hop_robot(r)) {
      nodes.push_back(discs.size());
      seed.push_back(is_seed(r));
    }
    discs.push_back({r.at("id").get<EntityId>(), BodyKind::robot, kRobotRadius, pose_from_meta(r.at("pose")), true});
  }
  for (const Json& o : meta.at("objects")) {
    discs.push_back({o.at("id").get<EntityId>(), BodyKind::pogobject, o.at("radius").get<double>(),
                     pose_from_meta(o.at("pose")), false});
  }
  std::vector<Segment> walls;
  for (const Json& w : meta.at("walls")) walls.push_back({point_from_meta(w.at("a")), point_from_meta(w.at("b"))});
  const Occluders occ{discs, walls};

  std::vector<std::uint8_t> hop(nodes.size(), kHopUnreached);
  std::queue<std::size_t> frontier;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (seed[i]) {
      hop[i] = 0;
      frontier.push(i);
    }
  }
  while (!frontier.empty()) {
    const std::size_t s = frontier.front();
    frontier.pop();
    const BodyDisc& tx = discs[nodes[s]];
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      if (hop[r] != kHopUnreached) continue;
      const BodyDisc& rx = discs[nodes[r]];
      if (reachable_faces_mask(tx.pose, kAllFacesMask, rx.pose, ch, occ, tx.id, rx.id) == 0) continue;
      if (hop[s] + 1 >= kHopUnreached - 1) continue;
      hop[r] = static_cast<std::uint8_t>(hop[s] + 1);
      frontier.push(r);
    }
  }
  std::map<EntityId, std::uint8_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) out[discs[nodes[i]].id] = hop[i];
  return out;
}

void MetricsAccumulator::configure(const Json& meta) {
  configured_ = true;
  sample_period_ = meta.at("sample_period_ticks").get<std::int64_t>();
  const std::int64_t dt_ns = meta.at("dt_ns").get<std::int64_t>();
  window_ticks_ = static_cast<std::uint64_t>(std::max<std::int64_t>(1, 1'000'000'000 / dt_ns));
  for (const Json& r : meta.at("robots")) robot_ids_.push_back(r.at("id").get<EntityId>());
  std::sort(robot_ids_.begin(), robot_ids_.end());
  hop_expected_ = hop_oracle(meta);
}

void MetricsAccumulator::observe_hop(const TraceRecord& record) {
  const auto it = hop_expected_.find(record.id);
  if (it == hop_expected_.end()) return;
  if (record.fields.value("type", "") != "user") return;
  const auto wire = from_hex(record.fields.value("wire", ""));
  if (!wire) return;
  const auto frame = decode_frame(*wire);
  if (!frame || frame->payload.empty()) return;
  hop_seen_[record.id] = frame->payload[0];
  hop_dirty_ = true;
}

bool MetricsAccumulator::hops_converged() const {
  if (hop_seen_.size() != hop_expected_.size()) return false;
  for (const auto& [id, hop] : hop_expected_) {
    if (hop_seen_.at(id) != hop) return false;
  }
  return true;
}

void MetricsAccumulator::write(const TraceRecord& record) {
  if (record.kind == RecordKind::meta) {
    configure(record.fields);
    return;
  }
  if (record.tick > next_tick_ || !open_tick_) close_ticks_before(record.tick);
  open_tick_ = record.tick;
  switch (record.kind) {
    case RecordKind::frame_rx: {
      ++delivered_;
      if (record.fields.value("type", "") != "user") break;
      const EntityId sender = record.fields.at("sender").get<EntityId>();
      if (!std::binary_search(robot_ids_.begin(), robot_ids_.end(), sender)) break;
      const auto edge = std::make_pair(record.id, sender);
      const auto [it, inserted] = edge_last_.try_emplace(edge, record.tick);
      if (inserted) {
        ++active_edges_;
      } else {
        it->second = record.tick;
      }
      edge_events_.emplace_back(record.tick, edge);
      break;
    }
    case RecordKind::frame_drop:
      ++dropped_;
      break;
    case RecordKind::frame_tx:
      observe_hop(record);
      break;
    default:
      break;
  }
}

void MetricsAccumulator::close_ticks_before(std::uint64_t tick) {
  if (!open_tick_) {
    next_tick_ = 0;
    open_tick_ = 0;
  }
  while (next_tick_ < tick) close_tick(next_tick_++);
}

void MetricsAccumulator::close_tick(std::uint64_t tick) {
  rows_.push_back({"delivered_frames", tick, static_cast<double>(delivered_)});
  rows_.push_back({"dropped_frames", tick, static_cast<double>(dropped_)});
  total_delivered_ += delivered_;
  total_dropped_ += dropped_;
  delivered_ = 0;
  dropped_ = 0;

  while (!edge_events_.empty() && edge_events_.front().first + window_ticks_ <= tick) {
    const auto [when, edge] = edge_events_.front();
    edge_events_.pop_front();
    const auto it = edge_last_.find(edge);
    if (it != edge_last_.end() && it->second == when) {
      edge_last_.erase(it);
      --active_edges_;
    }
  }
  if (sample_period_ > 0 && tick % static_cast<std::uint64_t>(sample_period_) == 0) {
    const double mean =
        robot_ids_.empty() ? 0.0 : static_cast<double>(active_edges_) / static_cast<double>(robot_ids_.size());
    rows_.push_back({"mean_neighbor_count", tick, mean});
  }

  if (hop_dirty_ && !hop_converged_at_ && !hop_expected_.empty()) {
    if (hops_converged()) hop_converged_at_ = tick;
  }
  hop_dirty_ = false;
}

std::vector<MetricRow> MetricsAccumulator::finish(std::optional<std::uint64_t> last_tick) {
  if (last_tick) {
    close_ticks_before(*last_tick + 1);
  } else if (open_tick_) {
    close_ticks_before(*open_tick_ + 1);
  }
  const std::uint64_t end = next_tick_ > 0 ? next_tick_ - 1 : 0;
  summary_.clear();
  summary_.push_back({"total_delivered", end, static_cast<double>(total_delivered_)});
  summary_.push_back({"total_dropped", end, static_cast<double>(total_dropped_)});
  if (!hop_expected_.empty()) {
    summary_.push_back(
        {"hop_convergence_tick", end, hop_converged_at_ ? static_cast<double>(*hop_converged_at_) : -1.0});
  }
  std::vector<MetricRow> out = rows_;
  out.insert(out.end(), summary_.begin(), summary_.end());
  return out;
}

std::vector<MetricRow> compute_metrics(const std::vector<TraceRecord>& records) {
  MetricsAccumulator acc;
  for (const TraceRecord& r : records) acc.write(r);
  return acc.finish();
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "metric,tick,value\n";
  for (const MetricRow& r : rows) out << r.name << ',' << r.tick << ',' << Json(canonical_number(r.value)).dump() << '\n';
}

}  // namespace pogosim
