#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pogosim/ir.hpp"
#include "pogosim/locomotion.hpp"
#include "pogosim/rng.hpp"
#include "pogosim/sensing.hpp"
#include "pogosim/types.hpp"

namespace pogosim {

inline constexpr std::size_t kMaxSendsPerTick = 4;
inline constexpr std::size_t kInboxCapacity = 32;
inline constexpr std::size_t kMaxSignalPayload = 16;

struct ReceivedMessage {
  EntityId sender = 0;
  std::uint16_t seq = 0;
  MsgType type = MsgType::user;
  FaceId face = FaceId::front;
  std::vector<std::uint8_t> payload;
};

enum class SignalOrigin : std::uint8_t { shower, wall, script };
std::string_view to_string(SignalOrigin o);

struct UserSignal {
  std::uint8_t code = 0;
  std::vector<std::uint8_t> payload;
  SignalOrigin origin = SignalOrigin::shower;
};

struct OutgoingFrame {
  std::vector<std::uint8_t> payload;
  std::uint8_t face_mask = kAllFacesMask;
};

using ParamMap = std::map<std::string, double, std::less<>>;

/// Per-robot controller inputs and outputs. Inputs are the previous tick's
/// channel and sensor results; outputs are picked up by the world after the
/// controller returns.
struct RobotIo {
  EntityId id = 0;
  std::uint64_t millis = 0;
  std::uint32_t period_ms = 33;
  double period_s = 0.033;
  LocomotionModel model = LocomotionModel::vibration;
  ParamMap params;

  std::array<std::deque<ReceivedMessage>, kFaceCount> inbox;
  std::deque<UserSignal> signals;
  PhotoReadings photo{};
  ImuSample imu;
  RngStream rng;

  MotorCommand motors;
  LedArray leds{};
  std::vector<OutgoingFrame> outbox;
  std::size_t rejected_sends = 0;
};

/// The programming surface handed to a controller for one tick.
class Api {
 public:
  explicit Api(RobotIo& io) : io_(io) {}

  EntityId robot_id() const { return io_.id; }
  std::uint64_t millis() const { return io_.millis; }
  std::uint32_t period_ms() const { return io_.period_ms; }
  double period_seconds() const { return io_.period_s; }
  LocomotionModel locomotion() const { return io_.model; }
  double param(std::string_view name, double fallback = 0.0) const;

  bool has_message(FaceId face) const { return !io_.inbox[face_index(face)].empty(); }
  std::optional<ReceivedMessage> receive(FaceId face);
  /// Pops from the first non-empty face queue in face order.
  std::optional<ReceivedMessage> receive_any();

  /// Queues a user frame. Fails once 4 frames were sent this tick, on empty
  /// mask, or on payload over 64 bytes.
  bool send(std::span<const std::uint8_t> payload, std::uint8_t face_mask = kAllFacesMask);

  void set_motors(double left, double right);
  void set_aux_motor(double duty) { io_.motors.aux = duty; }
  MotorCommand motors() const { return io_.motors; }
  void set_led(std::size_t index, Rgb color);
  Rgb led(std::size_t index) const { return io_.leds.at(index); }

  const PhotoReadings& photosensors() const { return io_.photo; }
  std::uint16_t photosensor(PhotoSensor s) const { return io_.photo[static_cast<std::size_t>(s)]; }
  const ImuSample& imu() const { return io_.imu; }

  double random_uniform() { return io_.rng.uniform(); }
  std::uint32_t random_u32() { return io_.rng.next_u32(); }
  double random_exponential(double mean) { return io_.rng.exponential(mean); }

 private:
  RobotIo& io_;
};

class Program {
 public:
  virtual ~Program() = default;
  virtual void setup(Api&) {}
  virtual void step(Api& api) = 0;
  virtual void on_signal(Api&, const UserSignal&) {}
  virtual std::vector<std::uint8_t> save_state() const { return {}; }
  virtual void load_state(std::span<const std::uint8_t>) {}
};

using ProgramFactory = std::function<std::unique_ptr<Program>()>;

class ProgramRegistry {
 public:
  /// Registry preloaded with idle, hop_gradient, phototaxis and run_tumble.
  static ProgramRegistry with_builtins();

  void add(std::string name, ProgramFactory factory);
  bool contains(std::string_view name) const;
  std::unique_ptr<Program> create(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ProgramFactory, std::less<>> factories_;
};

inline constexpr std::string_view kIdleProgram = "idle";

/// The program currently loaded on a robot.
struct ControllerSlot {
  std::string program_id{kIdleProgram};
  std::unique_ptr<Program> program;
  std::uint64_t ticks_since_swap = 0;
  bool started = false;
  bool halted = false;
  bool missing_reported = false;
};

struct ControllerTickResult {
  std::vector<std::string> errors;
  bool halted_now = false;
};

/// Loads `program_id` into the slot and resets its state.
/// Returns false if the id is unknown (slot unchanged).
bool load_program(ControllerSlot& slot, std::string_view program_id, const ProgramRegistry& registry);

/// Runs one controller period: pending signals, then step. Clamps outputs and
/// isolates exceptions to the robot.
ControllerTickResult tick_controller(ControllerSlot& slot, RobotIo& io, const ProgramRegistry& registry);

}  // namespace pogosim
