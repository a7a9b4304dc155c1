#include "pogosim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace pogosim {

ScenarioError::ScenarioError(Kind kind, std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message), kind_(kind), path_(std::move(path)) {}

std::uint64_t ScenarioConfig::duration_ticks() const {
  const double dt = static_cast<double>(world.dt_ns) * 1e-9;
  return static_cast<std::uint64_t>(std::llround(duration / dt));
}

namespace {

[[noreturn]] void semantic(const std::string& path, const std::string& message) {
  throw ScenarioError(ScenarioError::Kind::semantic, path, message);
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

/// Walks one JSON object, rejecting keys that are never read.
class Obj {
 public:
  Obj(const Json& j, std::string path, std::initializer_list<std::string_view> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) semantic(path_, "expected an object");
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
        throw ScenarioError(ScenarioError::Kind::unknown_key, join(path_, it.key()), "unknown key");
      }
    }
  }

  bool has(std::string_view key) const { return j_.contains(key); }
  const Json& at(std::string_view key) const {
    if (!has(key)) semantic(join(path_, key), "missing required field");
    return j_.at(std::string(key));
  }
  std::string path(std::string_view key) const { return join(path_, key); }

  double number(std::string_view key, double fallback) const {
    if (!has(key)) return fallback;
    return as_number(at(key), path(key));
  }
  double positive(std::string_view key, double fallback) const {
    const double v = number(key, fallback);
    if (!(v > 0.0)) semantic(path(key), "must be positive");
    return v;
  }
  double non_negative(std::string_view key, double fallback) const {
    const double v = number(key, fallback);
    if (!(v >= 0.0)) semantic(path(key), "must be non-negative");
    return v;
  }
  std::int64_t integer(std::string_view key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_number_integer()) semantic(path(key), "expected an integer");
    return v.get<std::int64_t>();
  }
  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_boolean()) semantic(path(key), "expected a boolean");
    return v.get<bool>();
  }
  std::string string(std::string_view key, std::string fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_string()) semantic(path(key), "expected a string");
    return v.get<std::string>();
  }

  static double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) semantic(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) semantic(path, "must be finite");
    return d;
  }

 private:
  const Json& j_;
  std::string path_;
};

Vec2 parse_point(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) semantic(path, "expected [x, y]");
  return {Obj::as_number(j[0], index(path, 0)), Obj::as_number(j[1], index(path, 1))};
}

/// Accepts [x, y], [x, y, theta] or {"x", "y", "theta"}, theta in radians.
Pose2D parse_pose(const Json& j, const std::string& path) {
  if (j.is_array()) {
    if (j.size() != 2 && j.size() != 3) semantic(path, "expected [x, y] or [x, y, theta]");
    const double theta = j.size() == 3 ? Obj::as_number(j[2], index(path, 2)) : 0.0;
    return make_pose(Obj::as_number(j[0], index(path, 0)), Obj::as_number(j[1], index(path, 1)), theta);
  }
  const Obj o(j, path, {"x", "y", "theta"});
  return make_pose(Obj::as_number(o.at("x"), o.path("x")), Obj::as_number(o.at("y"), o.path("y")),
                   o.number("theta", 0.0));
}

Polygon parse_arena(const Json& j, const std::string& path) {
  const Obj o(j, path, {"rect", "polygon"});
  if (o.has("rect") == o.has("polygon")) semantic(path, "exactly one of rect or polygon is required");
  if (o.has("rect")) {
    const Vec2 size = parse_point(o.at("rect"), o.path("rect"));
    if (!(size.x > 0.0 && size.y > 0.0)) semantic(o.path("rect"), "dimensions must be positive");
    return Polygon::rectangle(size.x, size.y);
  }
  const Json& verts = o.at("polygon");
  if (!verts.is_array() || verts.size() < 3) semantic(o.path("polygon"), "needs at least 3 vertices");
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < verts.size(); ++i) pts.push_back(parse_point(verts[i], index(o.path("polygon"), i)));
  try {
    Polygon poly(std::move(pts));
    if (!(poly.area() > 0.0)) semantic(o.path("polygon"), "degenerate polygon");
    return poly;
  } catch (const std::invalid_argument& e) {
    semantic(o.path("polygon"), e.what());
  }
}

MotionModelParams parse_motion(const Json& j, const std::string& path, MotionModelParams m) {
  const Obj o(j, path, {"model", "v_max", "omega_max", "wheel_base", "noise_v", "noise_omega", "bias_std", "bias_omega"});
  if (o.has("model")) {
    try {
      m.model = locomotion_model_from_string(o.string("model", ""));
    } catch (const std::invalid_argument&) {
      semantic(o.path("model"), "expected \"differential\" or \"vibration\"");
    }
  }
  m.v_max = o.positive("v_max", m.v_max);
  m.omega_max = o.positive("omega_max", m.omega_max);
  m.wheel_base = o.positive("wheel_base", m.wheel_base);
  m.noise_v = o.non_negative("noise_v", m.noise_v);
  m.noise_omega = o.non_negative("noise_omega", m.noise_omega);
  m.bias_std = o.non_negative("bias_std", m.bias_std);
  m.bias_omega = o.number("bias_omega", m.bias_omega);
  return m;
}

ParamMap parse_params(const Json& j, const std::string& path) {
  if (!j.is_object()) semantic(path, "expected an object of numbers");
  ParamMap out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.value().is_boolean()) {
      out[it.key()] = it.value().get<bool>() ? 1.0 : 0.0;
    } else {
      out[it.key()] = Obj::as_number(it.value(), join(path, it.key()));
    }
  }
  return out;
}

void check_program(const std::string& program, const std::string& path, const ProgramRegistry& registry) {
  if (!registry.contains(program)) semantic(path, "unknown program '" + program + "'");
}

std::vector<Pose2D> grid_layout(const Polygon& arena, std::size_t count, double spacing, double heading,
                                const std::string& path) {
  double min_x = arena.vertices()[0].x, max_x = min_x;
  double min_y = arena.vertices()[0].y, max_y = min_y;
  for (const Vec2& v : arena.vertices()) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  const double margin = kRobotRadius + 0.5 * (spacing - 2.0 * kRobotRadius);
  std::vector<Pose2D> out;
  for (double y = min_y + margin; y <= max_y - kRobotRadius && out.size() < count; y += spacing) {
    for (double x = min_x + margin; x <= max_x - kRobotRadius && out.size() < count; x += spacing) {
      const Vec2 p{x, y};
      if (arena.contains(p) && arena.boundary_distance(p) >= kRobotRadius) out.push_back(make_pose(x, y, heading));
    }
  }
  if (out.size() < count) {
    semantic(path, "arena fits only " + std::to_string(out.size()) + " robots at spacing " + std::to_string(spacing));
  }
  return out;
}

void parse_robots(const Json& j, const std::string& path, ScenarioConfig& cfg, const MotionModelParams& motion,
                  const ProgramRegistry& registry) {
  auto& robots = cfg.world.robots;
  if (j.is_object()) {
    const Obj o(j, path, {"count", "program", "params", "motion", "spacing", "heading"});
    const std::int64_t count = o.integer("count", -1);
    if (count < 0) semantic(o.path("count"), "missing or negative robot count");
    RobotSpec base;
    base.program = o.string("program", std::string(kIdleProgram));
    check_program(base.program, o.path("program"), registry);
    if (o.has("params")) base.params = parse_params(o.at("params"), o.path("params"));
    base.motion = o.has("motion") ? parse_motion(o.at("motion"), o.path("motion"), motion) : motion;
    const double spacing = o.number("spacing", 0.1);
    if (!(spacing >= 2.0 * kRobotRadius)) semantic(o.path("spacing"), "must be at least one robot diameter");
    const double heading = o.number("heading", 0.0);
    for (const Pose2D& p : grid_layout(cfg.world.arena, static_cast<std::size_t>(count), spacing, heading, path)) {
      RobotSpec r = base;
      r.pose = p;
      robots.push_back(std::move(r));
    }
    return;
  }
  if (!j.is_array()) semantic(path, "expected {count, ...} or a list of robots");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = index(path, i);
    const Obj o(j[i], p, {"pose", "program", "params", "motion"});
    RobotSpec r;
    r.pose = parse_pose(o.at("pose"), o.path("pose"));
    r.program = o.string("program", std::string(kIdleProgram));
    check_program(r.program, o.path("program"), registry);
    if (o.has("params")) r.params = parse_params(o.at("params"), o.path("params"));
    r.motion = o.has("motion") ? parse_motion(o.at("motion"), o.path("motion"), motion) : motion;
    robots.push_back(std::move(r));
  }
}

void validate_layout(const ScenarioConfig& cfg) {
  const Polygon& arena = cfg.world.arena;
  const auto& robots = cfg.world.robots;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const Vec2 p = robots[i].pose.position();
    if (!arena.contains(p) || arena.boundary_distance(p) < kRobotRadius) {
      semantic(index("robots", i) + ".pose", "robot is not inside the arena");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (norm(p - robots[k].pose.position()) < 2.0 * kRobotRadius) {
        semantic(index("robots", i) + ".pose", "overlaps robots[" + std::to_string(k) + "]");
      }
    }
  }
  for (std::size_t i = 0; i < cfg.world.objects.size(); ++i) {
    const ObjectSpec& o = cfg.world.objects[i];
    if (!arena.contains(o.position) || arena.boundary_distance(o.position) < o.radius) {
      semantic(index("objects", i) + ".pos", "object is not inside the arena");
    }
    for (std::size_t k = 0; k < robots.size(); ++k) {
      if (norm(o.position - robots[k].pose.position()) < o.radius + kRobotRadius) {
        semantic(index("objects", i) + ".pos", "overlaps robots[" + std::to_string(k) + "]");
      }
    }
  }
}

}  // namespace

void append_script(ScenarioConfig& cfg, const Json& script, const std::string& path, const ProgramRegistry& registry) {
  if (!script.is_array()) semantic(path, "expected a list");
  const double dt = static_cast<double>(cfg.world.dt_ns) * 1e-9;
  for (std::size_t i = 0; i < script.size(); ++i) {
    const std::string p = index(path, i);
    const Obj o(script[i], p, {"at", "tick", "command", "payload", "source"});
    if (o.has("at") == o.has("tick")) semantic(p, "exactly one of at or tick is required");
    ScriptEntry entry;
    if (o.has("tick")) {
      const std::int64_t tick = o.integer("tick", 0);
      if (tick < 0) semantic(o.path("tick"), "must be non-negative");
      entry.tick = static_cast<std::uint64_t>(tick);
    } else {
      entry.tick = static_cast<std::uint64_t>(std::llround(o.non_negative("at", 0.0) / dt));
    }
    try {
      entry.command.command =
          command_from_json(o.string("command", ""), o.has("payload") ? o.at("payload") : Json::object());
    } catch (const std::invalid_argument& e) {
      semantic(p, e.what());
    }
    const std::string source = o.string("source", "script");
    if (source != "script" && source != "operator") semantic(o.path("source"), "expected \"script\" or \"operator\"");
    entry.command.source = source == "script" ? CommandSource::script : CommandSource::operator_console;
    if (const auto* sp = std::get_if<ShowerProgram>(&entry.command.command)) {
      check_program(sp->program_id, o.path("payload") + ".program", registry);
    }
    if (const auto* pr = std::get_if<ProgramRobots>(&entry.command.command)) {
      check_program(pr->program_id, o.path("payload") + ".program", registry);
    }
    cfg.script.push_back(std::move(entry));
  }
  std::stable_sort(cfg.script.begin(), cfg.script.end(),
                   [](const ScriptEntry& a, const ScriptEntry& b) { return a.tick < b.tick; });
}

Json script_to_json(const std::vector<ScriptEntry>& script) {
  Json out = Json::array();
  for (const ScriptEntry& e : script) {
    out.push_back({{"tick", e.tick},
                   {"command", std::string(command_name(e.command.command))},
                   {"payload", command_payload(e.command.command)},
                   {"source", std::string(to_string(e.command.source))}});
  }
  return out;
}

std::set<RecordKind> parse_kind_list(std::string_view list) {
  std::set<RecordKind> kinds;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    std::string_view name = list.substr(start, end - start);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (!name.empty()) {
      const auto kind = record_kind_from_string(name);
      if (!kind) throw std::invalid_argument("unknown record kind '" + std::string(name) + "'");
      kinds.insert(*kind);
    }
    start = end + 1;
  }
  return kinds;
}

ScenarioConfig parse_scenario(std::string_view text, const ProgramRegistry& registry) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(ScenarioError::Kind::syntax, "", "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  const Obj top(root, "",
                {"arena", "robots", "lights", "walls", "objects", "shower", "channel", "motion", "sensing", "seed",
                 "duration", "timing", "trace", "script"});

  ScenarioConfig cfg;
  WorldConfig& w = cfg.world;
  w.arena = parse_arena(top.at("arena"), "arena");

  if (top.has("seed")) {
    const Json& seed = top.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
      semantic("seed", "expected a non-negative integer");
    }
    w.seed = seed.get<std::uint64_t>();
  }
  cfg.duration = top.non_negative("duration", 0.0);
  if (!top.has("duration")) semantic("duration", "missing required field");

  if (top.has("timing")) {
    const Obj t(top.at("timing"), "timing", {"dt", "controller_period"});
    const double dt = t.positive("dt", 1e-3);
    w.dt_ns = std::llround(dt * 1e9);
    if (w.dt_ns <= 0) semantic("timing.dt", "below 1 ns");
    const double period = t.positive("controller_period", 0.033);
    w.controller_period_ticks = std::max<std::int64_t>(1, std::llround(period * 1e9 / static_cast<double>(w.dt_ns)));
  }
  if (top.has("trace")) {
    const Obj t(top.at("trace"), "trace", {"sample_period", "kinds"});
    const double sample = t.positive("sample_period", 0.1);
    w.sample_period_ticks = std::max<std::int64_t>(1, std::llround(sample * 1e9 / static_cast<double>(w.dt_ns)));
    if (t.has("kinds")) {
      const Json& kinds = t.at("kinds");
      if (!kinds.is_array()) semantic("trace.kinds", "expected a list of record kinds");
      for (std::size_t i = 0; i < kinds.size(); ++i) {
        const auto k = kinds[i].is_string() ? record_kind_from_string(kinds[i].get<std::string>()) : std::nullopt;
        if (!k) semantic(index("trace.kinds", i), "unknown record kind");
        cfg.trace_kinds.insert(*k);
      }
      if (!cfg.trace_kinds.empty()) cfg.trace_kinds.insert(RecordKind::meta);
    }
  }

  if (top.has("channel")) {
    const Obj c(top.at("channel"), "channel",
                {"range", "tx_half_angle", "rx_half_angle", "bitrate", "header_bytes", "collision_policy"});
    ChannelParams& ch = w.channel;
    ch.range = c.positive("range", ch.range);
    ch.tx_half_angle = c.positive("tx_half_angle", ch.tx_half_angle);
    ch.rx_half_angle = c.positive("rx_half_angle", ch.rx_half_angle);
    if (ch.tx_half_angle > 90.0) semantic("channel.tx_half_angle", "at most 90 degrees");
    if (ch.rx_half_angle > 90.0) semantic("channel.rx_half_angle", "at most 90 degrees");
    ch.bitrate = c.positive("bitrate", ch.bitrate);
    const std::int64_t header = c.integer("header_bytes", ch.header_bytes);
    if (header < 0 || header > 255) semantic("channel.header_bytes", "out of range");
    ch.header_bytes = static_cast<std::uint32_t>(header);
    if (c.has("collision_policy")) {
      const std::string policy = c.string("collision_policy", "");
      if (policy != "destructive" && policy != "capture") {
        semantic("channel.collision_policy", "expected \"destructive\" or \"capture\"");
      }
      ch.collision_policy = collision_policy_from_string(policy);
    }
  }

  if (top.has("sensing")) {
    const Obj s(top.at("sensing"), "sensing", {"noise_light", "i_sat", "noise_accel", "noise_gyro", "cosine_weighting"});
    SensingParams& sp = w.sensing;
    sp.noise_light = s.non_negative("noise_light", sp.noise_light);
    sp.i_sat = s.positive("i_sat", sp.i_sat);
    sp.noise_accel = s.non_negative("noise_accel", sp.noise_accel);
    sp.noise_gyro = s.non_negative("noise_gyro", sp.noise_gyro);
    sp.cosine_weighting = s.boolean("cosine_weighting", sp.cosine_weighting);
  }

  MotionModelParams motion;
  if (top.has("motion")) motion = parse_motion(top.at("motion"), "motion", motion);

  parse_robots(top.at("robots"), "robots", cfg, motion, registry);

  if (top.has("lights")) {
    const Json& lights = top.at("lights");
    if (!lights.is_array()) semantic("lights", "expected a list");
    for (std::size_t i = 0; i < lights.size(); ++i) {
      const std::string p = index("lights", i);
      const Obj o(lights[i], p, {"kind", "pos", "power"});
      LightSource l;
      const std::string kind = o.string("kind", "point");
      if (kind == "ambient") {
        l.kind = LightKind::ambient;
      } else if (kind != "point") {
        semantic(o.path("kind"), "expected \"point\" or \"ambient\"");
      }
      if (l.kind == LightKind::point) l.position = parse_point(o.at("pos"), o.path("pos"));
      l.power = o.non_negative("power", l.power);
      w.lights.push_back(l);
    }
  }

  if (top.has("walls")) {
    const Json& walls = top.at("walls");
    if (!walls.is_array()) semantic("walls", "expected a list");
    std::set<std::int64_t> ids;
    for (std::size_t i = 0; i < walls.size(); ++i) {
      const std::string p = index("walls", i);
      const Obj o(walls[i], p, {"a", "b", "wall_id", "beacon_period", "emit_range"});
      WallSpec ws;
      ws.segment = {parse_point(o.at("a"), o.path("a")), parse_point(o.at("b"), o.path("b"))};
      if (norm(ws.segment.b - ws.segment.a) <= 0.0) semantic(p, "wall has zero length");
      const std::int64_t id = o.integer("wall_id", static_cast<std::int64_t>(i));
      if (id < 0 || id > 0xFFFF) semantic(o.path("wall_id"), "must fit in 16 bits");
      if (!ids.insert(id).second) semantic(o.path("wall_id"), "duplicate wall_id");
      ws.wall_id = static_cast<std::uint16_t>(id);
      ws.beacon_period = o.positive("beacon_period", ws.beacon_period);
      ws.emit_range = o.positive("emit_range", ws.emit_range);
      w.walls.push_back(ws);
    }
  }

  if (top.has("objects")) {
    const Json& objects = top.at("objects");
    if (!objects.is_array()) semantic("objects", "expected a list");
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const std::string p = index("objects", i);
      const Obj o(objects[i], p,
                  {"pos", "radius", "movable", "push_threshold", "beacon_period", "object_id", "emit_range", "v_max"});
      ObjectSpec os;
      os.position = parse_point(o.at("pos"), o.path("pos"));
      os.radius = o.positive("radius", os.radius);
      os.movable = o.boolean("movable", os.movable);
      const std::int64_t threshold = o.integer("push_threshold", os.push_threshold);
      if (threshold < 1) semantic(o.path("push_threshold"), "must be at least 1");
      os.push_threshold = static_cast<std::uint32_t>(threshold);
      os.beacon_period = o.positive("beacon_period", os.beacon_period);
      const std::int64_t id = o.integer("object_id", static_cast<std::int64_t>(i));
      if (id < 0 || id > 0xFFFF) semantic(o.path("object_id"), "must fit in 16 bits");
      os.object_id = static_cast<std::uint16_t>(id);
      os.emit_range = o.positive("emit_range", os.emit_range);
      os.v_max = o.non_negative("v_max", os.v_max);
      w.objects.push_back(os);
    }
  }

  if (top.has("shower")) {
    const Obj o(top.at("shower"), "shower", {"pose", "cone_half_angle", "range"});
    if (o.has("pose")) w.shower.pose = parse_pose(o.at("pose"), o.path("pose"));
    w.shower.cone_half_angle = o.positive("cone_half_angle", w.shower.cone_half_angle);
    w.shower.range = o.positive("range", w.shower.range);
  }

  validate_layout(cfg);

  if (top.has("script")) append_script(cfg, top.at("script"), "script", registry);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path, const ProgramRegistry& registry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), registry);
}

}  // namespace pogosim
