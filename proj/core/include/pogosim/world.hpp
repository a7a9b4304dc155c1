#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pogosim/collisions.hpp"
#include "pogosim/firmware.hpp"
#include "pogosim/geometry.hpp"
#include "pogosim/ir.hpp"
#include "pogosim/locomotion.hpp"
#include "pogosim/peripherals.hpp"
#include "pogosim/rng.hpp"
#include "pogosim/sensing.hpp"
#include "pogosim/trace.hpp"
#include "pogosim/types.hpp"

namespace pogosim {

// --- configuration --------------------------------------------------------

struct RobotSpec {
  Pose2D pose;
  std::string program{kIdleProgram};
  ParamMap params;
  MotionModelParams motion;
};

struct WallSpec {
  Segment segment;
  std::uint16_t wall_id = 0;
  double beacon_period = 0.1;  // s
  double emit_range = 0.2;     // m
};

struct ObjectSpec {
  Vec2 position;
  double radius = 0.05;
  bool movable = false;
  std::uint32_t push_threshold = 2;
  double beacon_period = 0.1;
  std::uint16_t object_id = 0;
  double emit_range = 0.25;
  double v_max = 0.06;
};

struct ShowerSpec {
  Pose2D pose;
  double cone_half_angle = 30.0;
  double range = 0.5;
};

/// Fully resolved world description.
struct WorldConfig {
  Polygon arena = Polygon::rectangle(1.0, 1.0);
  std::vector<RobotSpec> robots;
  std::vector<LightSource> lights;
  std::vector<WallSpec> walls;
  std::vector<ObjectSpec> objects;
  ShowerSpec shower;
  ChannelParams channel;
  SensingParams sensing;
  std::uint64_t seed = 0;
  std::int64_t dt_ns = 1'000'000;
  std::int64_t controller_period_ticks = 33;
  std::int64_t sample_period_ticks = 100;
  CollisionSettings collisions;
};

// --- commands ---------------------------------------------------------------

struct ShowerSetPose {
  Pose2D pose;
};
struct ShowerEmitSignal {
  std::uint8_t code = 0;
  std::vector<std::uint8_t> payload;
};
struct ShowerProgram {
  std::string program_id;
};
/// Scripted reprogramming of explicit robots.
struct ProgramRobots {
  std::vector<EntityId> targets;
  std::string program_id;
};
/// Scripted signal delivered directly to explicit robots.
struct SignalRobots {
  std::vector<EntityId> targets;
  std::uint8_t code = 0;
  std::vector<std::uint8_t> payload;
};

using Command = std::variant<ShowerSetPose, ShowerEmitSignal, ShowerProgram, ProgramRobots, SignalRobots>;

enum class CommandSource : std::uint8_t { script, operator_console };
std::string_view to_string(CommandSource s);

struct IssuedCommand {
  Command command;
  CommandSource source = CommandSource::script;
};

std::string_view command_name(const Command& c);
Json command_payload(const Command& c);
/// Parses a command from its protocol name and payload. Throws std::invalid_argument.
Command command_from_json(std::string_view name, const Json& payload);

// --- snapshot ---------------------------------------------------------------

struct RobotView {
  EntityId id = 0;
  Pose2D pose;
  LedArray leds{};
  std::string program_id;
  bool halted = false;
  bool operator==(const RobotView&) const = default;
};

struct ObjectView {
  EntityId id = 0;
  std::uint16_t object_id = 0;
  Pose2D pose;
  double radius = 0.0;
  bool movable = false;
  bool operator==(const ObjectView&) const = default;
};

/// Immutable copy of the observable world state between steps.
struct SnapshotView {
  std::uint64_t tick = 0;
  double time = 0.0;
  std::vector<RobotView> robots;  // ascending id
  std::vector<ObjectView> objects;
  Pose2D shower_pose;
  double shower_range = 0.0;
  double shower_cone_half_angle = 0.0;
  std::size_t in_flight_frames = 0;

  bool operator==(const SnapshotView&) const = default;
};

Json snapshot_to_json(const SnapshotView& s);
SnapshotView snapshot_from_json(const Json& j);

// --- world ------------------------------------------------------------------

struct PendingSwap {
  std::string program_id;
  std::string cause;
};

struct Robot {
  EntityId id = 0;
  std::size_t body = 0;  // index into World::bodies()
  MotionModelParams motion;
  VibrationNoise noise;
  std::array<Pose2D, 3> history{};  // newest first
  std::size_t history_len = 0;
  ControllerSlot slot;
  RobotIo io;
  LedArray reported_leds{};
  std::optional<PendingSwap> pending_swap;
  RngStream motion_rng;
  RngStream sensor_rng;
  RngStream channel_rng;
  std::uint16_t next_seq = 0;
};

class World {
 public:
  /// Writes the meta record to `sink` when one is given.
  World(WorldConfig config, ProgramRegistry registry, RecordSink* sink = nullptr);

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  /// Advances exactly one tick.
  void step(std::span<const IssuedCommand> commands = {});

  const SimClock& clock() const { return clock_; }
  const WorldConfig& config() const { return config_; }
  const ProgramRegistry& registry() const { return registry_; }

  SnapshotView snapshot() const;
  /// Detailed robot state for operator inspection; nullopt for unknown ids.
  std::optional<Json> inspect(EntityId id) const;

  std::span<const BodyDisc> bodies() const { return bodies_; }
  std::span<const Robot> robots() const { return robots_; }
  const Robot* find_robot(EntityId id) const;
  const Pogobject* find_object(EntityId id) const;
  std::span<const Pogobject> objects() const { return objects_; }
  std::span<const WallSegment> walls() const { return walls_; }
  const ShowerDevice& shower() const { return shower_; }
  std::size_t in_flight() const { return in_flight_.size() + scheduled_.size(); }
  const Json& meta() const { return meta_; }

  Pose2D robot_pose(const Robot& r) const { return bodies_[r.body].pose; }

  /// Test hook: overwrite a body pose between steps.
  void set_body_pose(EntityId id, const Pose2D& pose);

 private:
  struct RxSlot {
    std::size_t robot = 0;  // index into robots_
    FaceId face = FaceId::front;
    double distance = 0.0;
    Vec2 source;
  };
  enum class TxSource : std::uint8_t { robot, wall, object, shower };
  struct Transmission {
    IrFrame frame;
    TxSource source = TxSource::robot;
    std::size_t source_index = 0;
    std::int64_t t_start_ns = 0;
    std::int64_t t_end_ns = 0;
    Pose2D origin;
    std::vector<RxSlot> receptions;
    std::vector<EntityId> signal_targets;
    bool resolved = false;
  };

  void emit(RecordKind kind, Phase phase, EntityId id, Json fields);
  void flush_records();

  void apply_command(const IssuedCommand& cmd);
  void run_controllers();
  void actuate();
  void resolve_contacts();
  void propagate();
  void sample_sensors();
  void write_outputs();

  void schedule_robot_frames(Robot& robot, std::size_t robot_index);
  void schedule_beacons();
  void register_transmission(Transmission& tx);
  void complete_transmission(Transmission& tx);
  void deliver(Transmission& tx, const RxSlot& slot);
  Occluders occluders() const;

  std::size_t robot_index(EntityId id) const;
  Json build_meta() const;

  WorldConfig config_;
  ProgramRegistry registry_;
  RecordSink* sink_;
  SimClock clock_;
  std::vector<BodyDisc> bodies_;
  std::vector<Robot> robots_;
  std::vector<Pogobject> objects_;
  std::vector<WallSegment> walls_;
  std::vector<Segment> wall_segments_;
  ShowerDevice shower_;
  std::map<EntityId, std::size_t> robot_lookup_;
  std::vector<Transmission> scheduled_;
  std::vector<Transmission> in_flight_;
  std::vector<IssuedCommand> pending_shower_signals_;
  std::uint16_t shower_seq_ = 0;
  std::vector<std::uint16_t> wall_seq_;
  std::vector<std::uint16_t> object_seq_;
  std::int64_t max_airtime_ns_ = 0;
  Json meta_;
  std::vector<TraceRecord> tick_records_;
};

}  // namespace pogosim
