#include "pogosim/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pogosim {

namespace {

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Json pose_array(const Pose2D& p) { return canonical_array({p.x, p.y, p.theta}); }

Json leds_json(const LedArray& leds) {
  Json arr = Json::array();
  for (const Rgb& c : leds) arr.push_back({c.r, c.g, c.b});
  return arr;
}

LedArray leds_from_json(const Json& j) {
  LedArray leds{};
  for (std::size_t i = 0; i < kLedCount && i < j.size(); ++i) {
    leds[i] = {j[i].at(0).get<std::uint8_t>(), j[i].at(1).get<std::uint8_t>(), j[i].at(2).get<std::uint8_t>()};
  }
  return leds;
}

std::vector<std::uint8_t> bytes_from_json(const Json& j, std::size_t max_len, const char* what) {
  std::vector<std::uint8_t> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array of bytes");
  for (const Json& b : j) {
    const int v = b.get<int>();
    if (v < 0 || v > 255) throw std::invalid_argument(std::string(what) + " byte out of range");
    out.push_back(static_cast<std::uint8_t>(v));
  }
  if (out.size() > max_len) throw std::invalid_argument(std::string(what) + " too long");
  return out;
}

std::vector<EntityId> targets_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("targets must be an array of robot ids");
  std::vector<EntityId> out;
  for (const Json& t : j) out.push_back(t.get<EntityId>());
  return out;
}

std::uint8_t code_from_json(const Json& j) {
  const int code = j.get<int>();
  if (code < 0 || code > 255) throw std::invalid_argument("signal code must fit in 8 bits");
  return static_cast<std::uint8_t>(code);
}

}  // namespace

std::string_view to_string(CommandSource s) { return s == CommandSource::script ? "script" : "operator"; }

std::string_view command_name(const Command& c) {
  struct Visitor {
    std::string_view operator()(const ShowerSetPose&) const { return "shower.set_pose"; }
    std::string_view operator()(const ShowerEmitSignal&) const { return "shower.emit_signal"; }
    std::string_view operator()(const ShowerProgram&) const { return "shower.program"; }
    std::string_view operator()(const ProgramRobots&) const { return "program"; }
    std::string_view operator()(const SignalRobots&) const { return "signal"; }
  };
  return std::visit(Visitor{}, c);
}

Json command_payload(const Command& c) {
  struct Visitor {
    Json operator()(const ShowerSetPose& p) const {
      return {{"x", canonical_number(p.pose.x)}, {"y", canonical_number(p.pose.y)},
              {"theta", canonical_number(p.pose.theta)}};
    }
    Json operator()(const ShowerEmitSignal& s) const { return {{"code", s.code}, {"payload", s.payload}}; }
    Json operator()(const ShowerProgram& p) const { return {{"program", p.program_id}}; }
    Json operator()(const ProgramRobots& p) const { return {{"targets", p.targets}, {"program", p.program_id}}; }
    Json operator()(const SignalRobots& s) const {
      return {{"targets", s.targets}, {"code", s.code}, {"payload", s.payload}};
    }
  };
  return std::visit(Visitor{}, c);
}

Command command_from_json(std::string_view name, const Json& payload) {
  const Json p = payload.is_null() ? Json::object() : payload;
  if (!p.is_object()) throw std::invalid_argument("command payload must be an object");
  try {
    if (name == "shower.set_pose") {
      return ShowerSetPose{make_pose(p.at("x").get<double>(), p.at("y").get<double>(), p.value("theta", 0.0))};
    }
    if (name == "shower.emit_signal") {
      return ShowerEmitSignal{code_from_json(p.at("code")),
                              bytes_from_json(p.value("payload", Json()), kMaxSignalPayload, "signal payload")};
    }
    if (name == "shower.program") return ShowerProgram{p.at("program").get<std::string>()};
    if (name == "program") return ProgramRobots{targets_from_json(p.at("targets")), p.at("program").get<std::string>()};
    if (name == "signal") {
      return SignalRobots{targets_from_json(p.at("targets")), code_from_json(p.at("code")),
                          bytes_from_json(p.value("payload", Json()), kMaxSignalPayload, "signal payload")};
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string(name) + ": " + e.what());
  }
  throw std::invalid_argument("unknown command '" + std::string(name) + "'");
}

// --- snapshot -----------------------------------------------------------------

Json snapshot_to_json(const SnapshotView& s) {
  Json robots = Json::array();
  for (const RobotView& r : s.robots) {
    robots.push_back({{"id", r.id},
                      {"x", r.pose.x},
                      {"y", r.pose.y},
                      {"theta", r.pose.theta},
                      {"leds", leds_json(r.leds)},
                      {"program", r.program_id},
                      {"halted", r.halted}});
  }
  Json objects = Json::array();
  for (const ObjectView& o : s.objects) {
    objects.push_back({{"id", o.id},
                       {"object_id", o.object_id},
                       {"x", o.pose.x},
                       {"y", o.pose.y},
                       {"theta", o.pose.theta},
                       {"radius", o.radius},
                       {"movable", o.movable}});
  }
  return {{"tick", s.tick},
          {"time", s.time},
          {"robots", robots},
          {"objects", objects},
          {"shower",
           {{"x", s.shower_pose.x},
            {"y", s.shower_pose.y},
            {"theta", s.shower_pose.theta},
            {"range", s.shower_range},
            {"cone_half_angle", s.shower_cone_half_angle}}},
          {"in_flight", s.in_flight_frames}};
}

SnapshotView snapshot_from_json(const Json& j) {
  SnapshotView s;
  s.tick = j.at("tick").get<std::uint64_t>();
  s.time = j.at("time").get<double>();
  for (const Json& r : j.at("robots")) {
    RobotView v;
    v.id = r.at("id").get<EntityId>();
    v.pose = {r.at("x").get<double>(), r.at("y").get<double>(), r.at("theta").get<double>()};
    v.leds = leds_from_json(r.at("leds"));
    v.program_id = r.at("program").get<std::string>();
    v.halted = r.at("halted").get<bool>();
    s.robots.push_back(std::move(v));
  }
  for (const Json& o : j.at("objects")) {
    ObjectView v;
    v.id = o.at("id").get<EntityId>();
    v.object_id = o.at("object_id").get<std::uint16_t>();
    v.pose = {o.at("x").get<double>(), o.at("y").get<double>(), o.at("theta").get<double>()};
    v.radius = o.at("radius").get<double>();
    v.movable = o.at("movable").get<bool>();
    s.objects.push_back(v);
  }
  const Json& sh = j.at("shower");
  s.shower_pose = {sh.at("x").get<double>(), sh.at("y").get<double>(), sh.at("theta").get<double>()};
  s.shower_range = sh.at("range").get<double>();
  s.shower_cone_half_angle = sh.at("cone_half_angle").get<double>();
  s.in_flight_frames = j.at("in_flight").get<std::size_t>();
  return s;
}

// --- world construction ---------------------------------------------------------

World::World(WorldConfig config, ProgramRegistry registry, RecordSink* sink)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      sink_(sink),
      clock_(config_.dt_ns, config_.controller_period_ticks) {
  config_.channel.validate();
  config_.sensing.validate();
  if (config_.sample_period_ticks <= 0) throw std::invalid_argument("sample period must be at least one tick");

  const std::size_t entity_count = config_.robots.size() + config_.objects.size() + config_.walls.size() + 1;
  if (entity_count > kMaxEntityId + 1) throw std::invalid_argument("too many entities for 16-bit ids");

  const double dt = clock_.dt();
  auto period_ticks = [&](double seconds) { return std::max<std::int64_t>(1, std::llround(seconds / dt)); };

  EntityId next_id = 0;
  robots_.reserve(config_.robots.size());
  for (const RobotSpec& spec : config_.robots) {
    spec.motion.validate();
    Robot r;
    r.id = next_id++;
    r.body = bodies_.size();
    bodies_.push_back({r.id, BodyKind::robot, kRobotRadius, make_pose(spec.pose.x, spec.pose.y, spec.pose.theta), true});
    r.motion = spec.motion;
    RngStream init(config_.seed, r.id, StreamId::init);
    r.motion.bias_omega += init.gaussian(spec.motion.bias_std);
    r.motion_rng = RngStream(config_.seed, r.id, StreamId::motion_noise);
    r.sensor_rng = RngStream(config_.seed, r.id, StreamId::sensor_noise);
    r.channel_rng = RngStream(config_.seed, r.id, StreamId::channel);
    r.io.id = r.id;
    r.io.period_ms = static_cast<std::uint32_t>(config_.controller_period_ticks * config_.dt_ns / 1'000'000);
    r.io.period_s = clock_.controller_period();
    r.io.model = spec.motion.model;
    r.io.params = spec.params;
    r.io.rng = RngStream(config_.seed, r.id, StreamId::controller);
    if (!load_program(r.slot, spec.program, registry_)) r.slot.program_id = spec.program;
    r.history[0] = bodies_[r.body].pose;
    r.history_len = 1;
    robot_lookup_[r.id] = robots_.size();
    robots_.push_back(std::move(r));
  }

  for (const ObjectSpec& spec : config_.objects) {
    Pogobject o;
    o.disc = {next_id++, BodyKind::pogobject, spec.radius, {spec.position.x, spec.position.y, 0.0}, false};
    o.movable = spec.movable;
    o.push_threshold = spec.push_threshold;
    o.object_id = spec.object_id;
    o.emit_range = spec.emit_range;
    o.v_max = spec.v_max;
    o.beacon_period_ticks = period_ticks(spec.beacon_period);
    RngStream init(config_.seed, o.disc.id, StreamId::init);
    o.beacon_phase_ticks = static_cast<std::int64_t>(init.next_u64() % static_cast<std::uint64_t>(o.beacon_period_ticks));
    bodies_.push_back(o.disc);
    objects_.push_back(o);
  }
  object_seq_.assign(objects_.size(), 0);

  for (const WallSpec& spec : config_.walls) {
    WallSegment w;
    w.id = next_id++;
    w.segment = spec.segment;
    w.wall_id = spec.wall_id;
    w.emit_range = spec.emit_range;
    w.beacon_period_ticks = period_ticks(spec.beacon_period);
    RngStream init(config_.seed, w.id, StreamId::init);
    w.beacon_phase_ticks = static_cast<std::int64_t>(init.next_u64() % static_cast<std::uint64_t>(w.beacon_period_ticks));
    walls_.push_back(w);
    wall_segments_.push_back(spec.segment);
  }
  wall_seq_.assign(walls_.size(), 0);

  shower_.id = next_id++;
  shower_.pose = make_pose(config_.shower.pose.x, config_.shower.pose.y, config_.shower.pose.theta);
  shower_.cone_half_angle = config_.shower.cone_half_angle;
  shower_.range = config_.shower.range;

  max_airtime_ns_ = airtime_ns(kMaxPayload, config_.channel);
  meta_ = build_meta();
  if (sink_ != nullptr) {
    TraceRecord meta{0, RecordKind::meta, 0, meta_, Phase::setup};
    sink_->write(meta);
  }
}

Json World::build_meta() const {
  const ChannelParams& ch = config_.channel;
  Json arena = Json::array();
  for (const Vec2& v : config_.arena.vertices()) arena.push_back(canonical_array({v.x, v.y}));
  Json robots = Json::array();
  for (const Robot& r : robots_) {
    Json params = Json::object();
    for (const auto& [k, v] : r.io.params) params[k] = canonical_number(v);
    const Pose2D& p = bodies_[r.body].pose;
    robots.push_back({{"id", r.id},
                      {"pose", pose_array(p)},
                      {"program", r.slot.program_id},
                      {"params", params},
                      {"model", std::string(to_string(r.motion.model))}});
  }
  Json objects = Json::array();
  for (const Pogobject& o : objects_) {
    objects.push_back({{"id", o.disc.id},
                       {"object_id", o.object_id},
                       {"pose", pose_array(o.disc.pose)},
                       {"radius", canonical_number(o.disc.radius)},
                       {"movable", o.movable}});
  }
  Json walls = Json::array();
  for (const WallSegment& w : walls_) {
    walls.push_back({{"id", w.id},
                     {"wall_id", w.wall_id},
                     {"a", canonical_array({w.segment.a.x, w.segment.a.y})},
                     {"b", canonical_array({w.segment.b.x, w.segment.b.y})}});
  }
  Json lights = Json::array();
  for (const LightSource& l : config_.lights) {
    lights.push_back({{"pos", canonical_array({l.position.x, l.position.y})},
                      {"power", canonical_number(l.power)},
                      {"kind", l.kind == LightKind::point ? "point" : "ambient"}});
  }
  return {{"version", 1},
          {"seed", config_.seed},
          {"dt_ns", config_.dt_ns},
          {"controller_period_ticks", config_.controller_period_ticks},
          {"sample_period_ticks", config_.sample_period_ticks},
          {"channel",
           {{"range", canonical_number(ch.range)},
            {"tx_half_angle", canonical_number(ch.tx_half_angle)},
            {"rx_half_angle", canonical_number(ch.rx_half_angle)},
            {"bitrate", canonical_number(ch.bitrate)},
            {"header_bytes", ch.header_bytes},
            {"collision_policy", std::string(to_string(ch.collision_policy))}}},
          {"arena", arena},
          {"robots", robots},
          {"objects", objects},
          {"walls", walls},
          {"lights", lights},
          {"shower",
           {{"id", shower_.id},
            {"pose", pose_array(shower_.pose)},
            {"range", canonical_number(shower_.range)},
            {"cone_half_angle", canonical_number(shower_.cone_half_angle)}}}};
}

// --- accessors ----------------------------------------------------------------

std::size_t World::robot_index(EntityId id) const {
  const auto it = robot_lookup_.find(id);
  return it == robot_lookup_.end() ? robots_.size() : it->second;
}

const Robot* World::find_robot(EntityId id) const {
  const std::size_t i = robot_index(id);
  return i < robots_.size() ? &robots_[i] : nullptr;
}

const Pogobject* World::find_object(EntityId id) const {
  for (const Pogobject& o : objects_) {
    if (o.disc.id == id) return &o;
  }
  return nullptr;
}

void World::set_body_pose(EntityId id, const Pose2D& pose) {
  for (BodyDisc& b : bodies_) {
    if (b.id != id) continue;
    b.pose = make_pose(pose.x, pose.y, pose.theta);
    if (Robot* r = const_cast<Robot*>(find_robot(id))) {
      r->history[0] = b.pose;
      r->history_len = 1;
    }
    for (Pogobject& o : objects_) {
      if (o.disc.id == id) o.disc.pose = b.pose;
    }
    return;
  }
  throw std::invalid_argument("unknown entity id " + std::to_string(id));
}

Occluders World::occluders() const { return {bodies_, wall_segments_}; }

SnapshotView World::snapshot() const {
  SnapshotView s;
  s.tick = clock_.tick();
  s.time = clock_.time();
  s.robots.reserve(robots_.size());
  for (const Robot& r : robots_) {
    s.robots.push_back({r.id, bodies_[r.body].pose, r.io.leds, r.slot.program_id, r.slot.halted});
  }
  std::sort(s.robots.begin(), s.robots.end(), [](const RobotView& a, const RobotView& b) { return a.id < b.id; });
  for (const Pogobject& o : objects_) {
    s.objects.push_back({o.disc.id, o.object_id, o.disc.pose, o.disc.radius, o.movable});
  }
  s.shower_pose = shower_.pose;
  s.shower_range = shower_.range;
  s.shower_cone_half_angle = shower_.cone_half_angle;
  s.in_flight_frames = in_flight();
  return s;
}

std::optional<Json> World::inspect(EntityId id) const {
  const Robot* r = find_robot(id);
  if (r == nullptr) return std::nullopt;
  const Pose2D& p = bodies_[r->body].pose;
  Json inbox = Json::array();
  for (const auto& q : r->io.inbox) inbox.push_back(q.size());
  return Json{{"id", r->id},
              {"pose", {{"x", p.x}, {"y", p.y}, {"theta", p.theta}}},
              {"program", r->slot.program_id},
              {"halted", r->slot.halted},
              {"ticks_since_swap", r->slot.ticks_since_swap},
              {"model", std::string(to_string(r->motion.model))},
              {"motors", {r->io.motors.left, r->io.motors.right, r->io.motors.aux}},
              {"leds", leds_json(r->io.leds)},
              {"photosensors", r->io.photo},
              {"imu", {{"accel", {r->io.imu.accel_body.x, r->io.imu.accel_body.y}}, {"gyro_z", r->io.imu.gyro_z}}},
              {"inbox", inbox},
              {"pending_signals", r->io.signals.size()},
              {"millis", r->io.millis}};
}

// --- stepping -----------------------------------------------------------------

void World::emit(RecordKind kind, Phase phase, EntityId id, Json fields) {
  if (sink_ == nullptr) return;
  tick_records_.push_back({clock_.tick(), kind, id, std::move(fields), phase});
}

void World::flush_records() {
  if (sink_ == nullptr) return;
  std::stable_sort(tick_records_.begin(), tick_records_.end(), [](const TraceRecord& a, const TraceRecord& b) {
    if (a.phase != b.phase) return a.phase < b.phase;
    return a.id < b.id;
  });
  for (const TraceRecord& r : tick_records_) sink_->write(r);
  tick_records_.clear();
}

void World::step(std::span<const IssuedCommand> commands) {
  for (const IssuedCommand& c : commands) apply_command(c);
  if (clock_.is_controller_tick()) run_controllers();
  actuate();
  resolve_contacts();
  propagate();
  sample_sensors();
  write_outputs();
  flush_records();
  clock_.advance();
}

void World::apply_command(const IssuedCommand& issued) {
  const Command& cmd = issued.command;
  auto record_command = [&](Json extra = Json::object()) {
    Json fields = {{"command", std::string(command_name(cmd))},
                   {"payload", command_payload(cmd)},
                   {"source", std::string(to_string(issued.source))}};
    for (auto it = extra.begin(); it != extra.end(); ++it) fields[it.key()] = it.value();
    emit(RecordKind::command, Phase::commands, 0, std::move(fields));
  };
  auto reject = [&](const std::string& message) {
    emit(RecordKind::error, Phase::commands, 0,
         {{"message", message}, {"command", std::string(command_name(cmd))}});
  };
  auto unknown_target = [&](const std::vector<EntityId>& targets) -> std::optional<EntityId> {
    for (EntityId t : targets) {
      if (find_robot(t) == nullptr) return t;
    }
    return std::nullopt;
  };

  if (const auto* c = std::get_if<ShowerSetPose>(&cmd)) {
    shower_.pose = make_pose(c->pose.x, c->pose.y, c->pose.theta);
    record_command();
  } else if (std::holds_alternative<ShowerEmitSignal>(cmd)) {
    pending_shower_signals_.push_back(issued);
    record_command();
  } else if (const auto* c = std::get_if<ShowerProgram>(&cmd)) {
    if (!registry_.contains(c->program_id)) {
      reject("unknown program '" + c->program_id + "'");
      return;
    }
    const std::vector<EntityId> targets = shower_cone_targets(shower_, bodies_, occluders());
    for (EntityId t : targets) robots_[robot_index(t)].pending_swap = PendingSwap{c->program_id, "shower"};
    record_command({{"targets", targets}});
  } else if (const auto* c = std::get_if<ProgramRobots>(&cmd)) {
    if (const auto bad = unknown_target(c->targets)) {
      reject("unknown entity id " + std::to_string(*bad));
      return;
    }
    if (!registry_.contains(c->program_id)) {
      reject("unknown program '" + c->program_id + "'");
      return;
    }
    for (EntityId t : c->targets) robots_[robot_index(t)].pending_swap = PendingSwap{c->program_id, "script"};
    record_command();
  } else if (const auto* c = std::get_if<SignalRobots>(&cmd)) {
    if (const auto bad = unknown_target(c->targets)) {
      reject("unknown entity id " + std::to_string(*bad));
      return;
    }
    record_command();
    for (EntityId t : c->targets) {
      robots_[robot_index(t)].io.signals.push_back({c->code, c->payload, SignalOrigin::script});
      emit(RecordKind::signal, Phase::commands, t, {{"code", c->code}, {"origin", "script"}});
    }
  }
}

void World::run_controllers() {
  const std::uint64_t tick = clock_.tick();
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    Robot& r = robots_[i];
    if (r.pending_swap) {
      load_program(r.slot, r.pending_swap->program_id, registry_);
      r.io.motors = {};
      emit(RecordKind::program_swap, Phase::controllers, r.id,
           {{"program", r.pending_swap->program_id}, {"cause", r.pending_swap->cause}});
      r.pending_swap.reset();
    }
    r.io.millis = static_cast<std::uint64_t>(static_cast<std::int64_t>(tick) * config_.dt_ns / 1'000'000);
    const bool was_halted = r.slot.halted;
    const ControllerTickResult result = tick_controller(r.slot, r.io, registry_);
    for (const std::string& e : result.errors) {
      Json fields = {{"message", e}};
      if (result.halted_now) fields["halted"] = true;
      emit(RecordKind::error, Phase::controllers, r.id, std::move(fields));
    }
    if (!was_halted) {
      for (std::size_t led = 0; led < kLedCount; ++led) {
        if (r.io.leds[led] == r.reported_leds[led]) continue;
        const Rgb c = r.io.leds[led];
        emit(RecordKind::led, Phase::controllers, r.id, {{"led", led}, {"rgb", {c.r, c.g, c.b}}});
      }
      r.reported_leds = r.io.leds;
      schedule_robot_frames(r, i);
    }
    if (r.motion.model == LocomotionModel::vibration) r.noise = draw_vibration_noise(r.motion, r.motion_rng);
  }
}

void World::schedule_robot_frames(Robot& r, std::size_t robot_idx) {
  if (r.io.outbox.empty()) return;
  std::int64_t total = 0;
  for (const OutgoingFrame& f : r.io.outbox) total += airtime_ns(f.payload.size(), config_.channel);
  // Start offset within the controller period so the last frame ends before
  // the next controller tick reads the inbox.
  const std::int64_t window = config_.controller_period_ticks * config_.dt_ns - total;
  std::int64_t t = clock_.now_ns();
  if (window > 0) t += static_cast<std::int64_t>(r.channel_rng.uniform() * static_cast<double>(window));
  for (OutgoingFrame& out : r.io.outbox) {
    Transmission tx;
    tx.frame.sender = r.id;
    tx.frame.tx_face_mask = out.face_mask;
    tx.frame.seq = r.next_seq++;
    tx.frame.msg_type = MsgType::user;
    tx.frame.payload = std::move(out.payload);
    tx.source = TxSource::robot;
    tx.source_index = robot_idx;
    tx.t_start_ns = t;
    tx.t_end_ns = t + airtime_ns(tx.frame.payload.size(), config_.channel);
    t = tx.t_end_ns;
    emit(RecordKind::frame_tx, Phase::controllers, r.id,
         {{"seq", tx.frame.seq},
          {"type", "user"},
          {"faces", tx.frame.tx_face_mask},
          {"t_start_ns", tx.t_start_ns},
          {"t_end_ns", tx.t_end_ns},
          {"wire", to_hex(encode_frame(tx.frame))}});
    scheduled_.push_back(std::move(tx));
  }
  r.io.outbox.clear();
}

void World::actuate() {
  const double dt = clock_.dt();
  for (Robot& r : robots_) {
    if (r.slot.halted) continue;
    BodyDisc& body = bodies_[r.body];
    body.pose = locomotion_step(body.pose, r.io.motors, r.motion, r.noise, dt);
  }
}

void World::resolve_contacts() {
  const double dt = clock_.dt();
  std::vector<Pusher> pushers;
  for (std::size_t k = 0; k < objects_.size(); ++k) {
    Pogobject& o = objects_[k];
    if (!o.movable) continue;
    BodyDisc& body = bodies_[robots_.size() + k];
    o.disc.pose = body.pose;
    pushers.clear();
    for (const Robot& r : robots_) {
      if (r.slot.halted) continue;
      pushers.push_back({bodies_[r.body].pose, bodies_[r.body].radius, nominal_twist(r.io.motors, r.motion)});
    }
    const Pose2D moved = object_push_update(o, pushers, dt);
    if (moved == body.pose) continue;
    body.pose = moved;
    constrain_disc(body, &config_.arena, wall_segments_);
  }
  resolve_collisions(bodies_, &config_.arena, wall_segments_, config_.collisions);
  for (std::size_t k = 0; k < objects_.size(); ++k) objects_[k].disc.pose = bodies_[robots_.size() + k].pose;
}

void World::schedule_beacons() {
  const std::uint64_t tick = clock_.tick();
  auto beacon = [&](TxSource source, std::size_t index, EntityId sender, std::uint16_t& seq, BeaconSource kind,
                    std::uint16_t id) {
    Transmission tx;
    tx.frame.sender = sender;
    tx.frame.tx_face_mask = kAllFacesMask;
    tx.frame.seq = seq++;
    tx.frame.msg_type = MsgType::wall_beacon;
    tx.frame.payload = {static_cast<std::uint8_t>(kind), static_cast<std::uint8_t>(id & 0xFF),
                        static_cast<std::uint8_t>(id >> 8)};
    tx.source = source;
    tx.source_index = index;
    tx.t_start_ns = clock_.now_ns();
    tx.t_end_ns = tx.t_start_ns + airtime_ns(tx.frame.payload.size(), config_.channel);
    emit(RecordKind::frame_tx, Phase::channel, sender,
         {{"seq", tx.frame.seq},
          {"type", "wall_beacon"},
          {"faces", tx.frame.tx_face_mask},
          {"t_start_ns", tx.t_start_ns},
          {"t_end_ns", tx.t_end_ns},
          {"wire", to_hex(encode_frame(tx.frame))}});
    scheduled_.push_back(std::move(tx));
  };
  for (std::size_t i = 0; i < walls_.size(); ++i) {
    const WallSegment& w = walls_[i];
    if (beacon_due(tick, w.beacon_period_ticks, w.beacon_phase_ticks)) {
      beacon(TxSource::wall, i, w.id, wall_seq_[i], BeaconSource::wall, w.wall_id);
    }
  }
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const Pogobject& o = objects_[i];
    if (beacon_due(tick, o.beacon_period_ticks, o.beacon_phase_ticks)) {
      beacon(TxSource::object, i, o.disc.id, object_seq_[i], BeaconSource::object, o.object_id);
    }
  }
  for (const IssuedCommand& issued : pending_shower_signals_) {
    const auto& sig = std::get<ShowerEmitSignal>(issued.command);
    Transmission tx;
    tx.frame.sender = shower_.id;
    tx.frame.tx_face_mask = kAllFacesMask;
    tx.frame.seq = shower_seq_++;
    tx.frame.msg_type = MsgType::shower_signal;
    tx.frame.payload.push_back(sig.code);
    tx.frame.payload.insert(tx.frame.payload.end(), sig.payload.begin(), sig.payload.end());
    tx.source = TxSource::shower;
    tx.t_start_ns = clock_.now_ns();
    tx.t_end_ns = tx.t_start_ns + airtime_ns(tx.frame.payload.size(), config_.channel);
    emit(RecordKind::frame_tx, Phase::channel, shower_.id,
         {{"seq", tx.frame.seq},
          {"type", "shower_signal"},
          {"faces", tx.frame.tx_face_mask},
          {"t_start_ns", tx.t_start_ns},
          {"t_end_ns", tx.t_end_ns},
          {"wire", to_hex(encode_frame(tx.frame))}});
    scheduled_.push_back(std::move(tx));
  }
  pending_shower_signals_.clear();
}

void World::register_transmission(Transmission& tx) {
  const Occluders occ = occluders();
  const double rx_half = deg_to_rad(config_.channel.rx_half_angle);
  auto add_faces = [&](std::size_t robot_idx, FaceSet faces, double distance, Vec2 source) {
    for (FaceId f : kAllFaces) {
      if (faces & face_bit(f)) tx.receptions.push_back({robot_idx, f, distance, source});
    }
  };

  switch (tx.source) {
    case TxSource::robot: {
      const Robot& sender = robots_[tx.source_index];
      tx.origin = bodies_[sender.body].pose;
      for (std::size_t j = 0; j < robots_.size(); ++j) {
        if (j == tx.source_index) continue;
        const Pose2D& rx = bodies_[robots_[j].body].pose;
        const FaceSet faces = reachable_faces_mask(tx.origin, tx.frame.tx_face_mask, rx, config_.channel, occ,
                                                   sender.id, robots_[j].id);
        if (faces) add_faces(j, faces, norm(rx.position() - tx.origin.position()), tx.origin.position());
      }
      break;
    }
    case TxSource::wall: {
      const WallSegment& w = walls_[tx.source_index];
      tx.origin = {w.segment.a.x, w.segment.a.y, 0.0};
      const std::array<std::size_t, 1> own_wall = {tx.source_index};
      for (std::size_t j = 0; j < robots_.size(); ++j) {
        const Pose2D& rx = bodies_[robots_[j].body].pose;
        const auto q = wall_emission_point(w, rx.position());
        if (!q) continue;
        const std::array<EntityId, 1> ends = {robots_[j].id};
        if (!line_of_sight(*q, rx.position(), occ, ends, own_wall)) continue;
        add_faces(j, arrival_faces(rx, *q, rx_half), norm(rx.position() - *q), *q);
      }
      break;
    }
    case TxSource::object: {
      const Pogobject& o = objects_[tx.source_index];
      tx.origin = o.disc.pose;
      const Vec2 src = o.disc.pose.position();
      for (std::size_t j = 0; j < robots_.size(); ++j) {
        const Pose2D& rx = bodies_[robots_[j].body].pose;
        const double d = norm(rx.position() - src);
        if (d > o.emit_range) continue;
        const std::array<EntityId, 2> ends = {o.disc.id, robots_[j].id};
        if (!line_of_sight(src, rx.position(), occ, ends)) continue;
        add_faces(j, arrival_faces(rx, src, rx_half), d, src);
      }
      break;
    }
    case TxSource::shower: {
      tx.origin = shower_.pose;
      const Vec2 src = shower_.pose.position();
      tx.signal_targets = shower_cone_targets(shower_, bodies_, occ);
      for (EntityId t : tx.signal_targets) {
        const std::size_t j = robot_index(t);
        const Pose2D& rx = bodies_[robots_[j].body].pose;
        add_faces(j, arrival_faces(rx, src, rx_half), norm(rx.position() - src), src);
      }
      break;
    }
  }
}

void World::deliver(Transmission& tx, const RxSlot& slot) {
  Robot& r = robots_[slot.robot];
  const Pose2D& rx = bodies_[r.body].pose;
  emit(RecordKind::frame_rx, Phase::channel, r.id,
       {{"sender", tx.frame.sender},
        {"seq", tx.frame.seq},
        {"type", std::string(to_string(tx.frame.msg_type))},
        {"face", face_index(slot.face)},
        {"pose", pose_array(rx)},
        {"src", canonical_array({slot.source.x, slot.source.y})}});
  if (tx.frame.msg_type == MsgType::shower_signal) return;
  auto& queue = r.io.inbox[face_index(slot.face)];
  queue.push_back({tx.frame.sender, tx.frame.seq, tx.frame.msg_type, slot.face, tx.frame.payload});
  if (queue.size() > kInboxCapacity) {
    const ReceivedMessage& dropped = queue.front();
    emit(RecordKind::frame_drop, Phase::channel, r.id,
         {{"sender", dropped.sender},
          {"seq", dropped.seq},
          {"face", face_index(slot.face)},
          {"reason", "overflow"}});
    queue.pop_front();
  }
}

void World::complete_transmission(Transmission& tx) {
  std::vector<Reception> interferers;
  std::vector<std::size_t> signal_delivered;
  for (const RxSlot& slot : tx.receptions) {
    interferers.clear();
    const Reception target{tx.t_start_ns, tx.t_end_ns, slot.distance};
    for (const Transmission& other : in_flight_) {
      if (&other == &tx) continue;
      if (!(other.t_start_ns < tx.t_end_ns && tx.t_start_ns < other.t_end_ns)) continue;
      for (const RxSlot& os : other.receptions) {
        if (os.robot == slot.robot && os.face == slot.face) {
          interferers.push_back({other.t_start_ns, other.t_end_ns, os.distance});
        }
      }
    }
    if (survives(target, interferers, config_.channel.collision_policy)) {
      deliver(tx, slot);
      if (tx.frame.msg_type == MsgType::shower_signal) signal_delivered.push_back(slot.robot);
    } else {
      emit(RecordKind::frame_drop, Phase::channel, robots_[slot.robot].id,
           {{"sender", tx.frame.sender},
            {"seq", tx.frame.seq},
            {"face", face_index(slot.face)},
            {"reason", "collision"}});
    }
  }
  std::sort(signal_delivered.begin(), signal_delivered.end());
  signal_delivered.erase(std::unique(signal_delivered.begin(), signal_delivered.end()), signal_delivered.end());
  for (std::size_t idx : signal_delivered) {
    Robot& r = robots_[idx];
    UserSignal s;
    s.code = tx.frame.payload.empty() ? 0 : tx.frame.payload[0];
    if (tx.frame.payload.size() > 1) s.payload.assign(tx.frame.payload.begin() + 1, tx.frame.payload.end());
    s.origin = SignalOrigin::shower;
    r.io.signals.push_back(s);
    emit(RecordKind::signal, Phase::channel, r.id, {{"code", s.code}, {"origin", "shower"}});
  }
  tx.resolved = true;
}

void World::propagate() {
  schedule_beacons();
  const std::int64_t tick_end = clock_.now_ns() + config_.dt_ns;

  auto order = [](const Transmission& a, const Transmission& b) {
    if (a.t_start_ns != b.t_start_ns) return a.t_start_ns < b.t_start_ns;
    if (a.frame.sender != b.frame.sender) return a.frame.sender < b.frame.sender;
    return a.frame.seq < b.frame.seq;
  };
  std::stable_sort(scheduled_.begin(), scheduled_.end(), order);
  std::size_t started = 0;
  while (started < scheduled_.size() && scheduled_[started].t_start_ns < tick_end) ++started;
  for (std::size_t i = 0; i < started; ++i) {
    register_transmission(scheduled_[i]);
    in_flight_.push_back(std::move(scheduled_[i]));
  }
  scheduled_.erase(scheduled_.begin(), scheduled_.begin() + static_cast<std::ptrdiff_t>(started));

  std::vector<std::size_t> due;
  for (std::size_t i = 0; i < in_flight_.size(); ++i) {
    if (!in_flight_[i].resolved && in_flight_[i].t_end_ns <= tick_end) due.push_back(i);
  }
  std::sort(due.begin(), due.end(), [&](std::size_t a, std::size_t b) {
    const Transmission& ta = in_flight_[a];
    const Transmission& tb = in_flight_[b];
    if (ta.t_end_ns != tb.t_end_ns) return ta.t_end_ns < tb.t_end_ns;
    return order(ta, tb);
  });
  for (std::size_t i : due) complete_transmission(in_flight_[i]);

  // A resolved frame can still interfere with anything that started before it
  // ended; those end at most one maximal airtime later.
  std::erase_if(in_flight_,
                [&](const Transmission& t) { return t.resolved && t.t_end_ns + max_airtime_ns_ <= tick_end; });
}

void World::sample_sensors() {
  const bool controller_next = (clock_.tick() + 1) % static_cast<std::uint64_t>(config_.controller_period_ticks) == 0;
  for (Robot& r : robots_) {
    const Pose2D& p = bodies_[r.body].pose;
    r.history[2] = r.history[1];
    r.history[1] = r.history[0];
    r.history[0] = p;
    r.history_len = std::min<std::size_t>(3, r.history_len + 1);
    if (!controller_next) continue;
    r.io.photo = read_photosensors(p, config_.sensing, config_.lights, r.sensor_rng);
    r.io.imu = read_imu(std::span<const Pose2D>(r.history.data(), r.history_len), clock_.dt(), clock_.tick(),
                        config_.sensing, r.sensor_rng);
  }
}

void World::write_outputs() {
  if (sink_ == nullptr) return;
  if (clock_.tick() % static_cast<std::uint64_t>(config_.sample_period_ticks) != 0) return;
  for (const Robot& r : robots_) {
    const Pose2D& p = bodies_[r.body].pose;
    emit(RecordKind::pose, Phase::output, r.id,
         {{"x", canonical_number(p.x)}, {"y", canonical_number(p.y)}, {"theta", canonical_number(p.theta)}});
  }
  for (const Pogobject& o : objects_) {
    const Pose2D& p = o.disc.pose;
    emit(RecordKind::pose, Phase::output, o.disc.id,
         {{"x", canonical_number(p.x)}, {"y", canonical_number(p.y)}, {"theta", canonical_number(p.theta)}});
  }
}

}  // namespace pogosim
