#include "pogosim/replay.hpp"

#include <algorithm>
#include <istream>
#include <map>

namespace pogosim {

namespace {

Pose2D pose_from(const Json& arr) { return {arr.at(0).get<double>(), arr.at(1).get<double>(), arr.at(2).get<double>()}; }

SnapshotView initial_snapshot(const Json& meta) {
  SnapshotView s;
  for (const Json& r : meta.at("robots")) {
    RobotView v;
    v.id = r.at("id").get<EntityId>();
    v.pose = pose_from(r.at("pose"));
    v.program_id = r.at("program").get<std::string>();
    s.robots.push_back(std::move(v));
  }
  std::sort(s.robots.begin(), s.robots.end(), [](const RobotView& a, const RobotView& b) { return a.id < b.id; });
  for (const Json& o : meta.at("objects")) {
    s.objects.push_back({o.at("id").get<EntityId>(), o.at("object_id").get<std::uint16_t>(), pose_from(o.at("pose")),
                         o.at("radius").get<double>(), o.at("movable").get<bool>()});
  }
  const Json& sh = meta.at("shower");
  s.shower_pose = pose_from(sh.at("pose"));
  s.shower_range = sh.at("range").get<double>();
  s.shower_cone_half_angle = sh.at("cone_half_angle").get<double>();
  return s;
}

}  // namespace

ReplayResult replay_records(TraceReadResult read, const std::set<RecordKind>& kinds) {
  ReplayResult out;
  out.truncated = read.truncated;
  out.bad_line = read.bad_line;
  out.last_complete_tick = read.last_complete_tick;
  out.error = read.error;

  auto keep = [&](const TraceRecord& r) {
    if (read.truncated && r.kind != RecordKind::meta && r.tick > read.last_complete_tick) return false;
    return kinds.empty() || kinds.count(r.kind) > 0;
  };

  SnapshotView state;
  std::map<EntityId, std::size_t> robot_at;
  std::map<EntityId, std::size_t> object_at;
  double dt = 1e-3;
  bool have_meta = false;
  std::optional<std::uint64_t> pose_tick;

  auto flush = [&]() {
    if (!pose_tick) return;
    SnapshotView s = state;
    s.tick = *pose_tick;
    s.time = static_cast<double>(*pose_tick) * dt;
    out.snapshots.push_back(std::move(s));
    pose_tick.reset();
  };

  for (TraceRecord& r : read.records) {
    if (read.truncated && r.kind != RecordKind::meta && r.tick > read.last_complete_tick) break;
    if (pose_tick && r.tick != *pose_tick) flush();
    switch (r.kind) {
      case RecordKind::meta:
        out.meta = r.fields;
        state = initial_snapshot(r.fields);
        dt = static_cast<double>(r.fields.at("dt_ns").get<std::int64_t>()) * 1e-9;
        robot_at.clear();
        object_at.clear();
        for (std::size_t i = 0; i < state.robots.size(); ++i) robot_at[state.robots[i].id] = i;
        for (std::size_t i = 0; i < state.objects.size(); ++i) object_at[state.objects[i].id] = i;
        have_meta = true;
        break;
      case RecordKind::pose: {
        if (!have_meta) break;
        const Pose2D p{r.fields.at("x").get<double>(), r.fields.at("y").get<double>(),
                       r.fields.at("theta").get<double>()};
        if (const auto it = robot_at.find(r.id); it != robot_at.end()) {
          state.robots[it->second].pose = p;
        } else if (const auto ot = object_at.find(r.id); ot != object_at.end()) {
          state.objects[ot->second].pose = p;
        }
        pose_tick = r.tick;
        break;
      }
      case RecordKind::led: {
        const auto it = robot_at.find(r.id);
        if (it == robot_at.end()) break;
        const std::size_t led = r.fields.at("led").get<std::size_t>();
        const Json& c = r.fields.at("rgb");
        if (led < kLedCount) {
          state.robots[it->second].leds[led] = {c.at(0).get<std::uint8_t>(), c.at(1).get<std::uint8_t>(),
                                                c.at(2).get<std::uint8_t>()};
        }
        break;
      }
      case RecordKind::program_swap: {
        const auto it = robot_at.find(r.id);
        if (it == robot_at.end()) break;
        state.robots[it->second].program_id = r.fields.at("program").get<std::string>();
        state.robots[it->second].halted = false;
        break;
      }
      case RecordKind::error: {
        const auto it = robot_at.find(r.id);
        if (it != robot_at.end() && r.fields.value("halted", false)) state.robots[it->second].halted = true;
        break;
      }
      case RecordKind::command: {
        if (r.fields.value("command", "") != "shower.set_pose") break;
        const Json& p = r.fields.at("payload");
        state.shower_pose = {p.at("x").get<double>(), p.at("y").get<double>(), p.at("theta").get<double>()};
        break;
      }
      default:
        break;
    }
    if (keep(r)) out.records.push_back(std::move(r));
  }
  flush();
  return out;
}

ReplayResult replay_trace(std::istream& in, const std::set<RecordKind>& kinds) {
  return replay_records(read_trace(in), kinds);
}

}  // namespace pogosim
