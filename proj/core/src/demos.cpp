#include "pogosim/demos.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <type_traits>

namespace pogosim {

namespace {

template <typename T>
std::vector<std::uint8_t> pack(const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::vector<std::uint8_t> out(sizeof(T));
  std::memcpy(out.data(), &value, sizeof(T));
  return out;
}

template <typename T>
void unpack(std::span<const std::uint8_t> bytes, T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  if (bytes.size() != sizeof(T)) throw std::invalid_argument("state size mismatch");
  std::memcpy(&value, bytes.data(), sizeof(T));
}

// Sets duties for a combined forward/turn request. turn > 0 is counterclockwise.
// The vibration model turns towards the slower brush, so the sign flips
// compared to wheels.
void drive(Api& api, double forward, double turn) {
  if (api.locomotion() == LocomotionModel::differential) {
    api.set_motors(forward - turn / 2.0, forward + turn / 2.0);
  } else {
    api.set_motors(forward + turn / 2.0, forward - turn / 2.0);
  }
}

void spin(Api& api, double direction, double duty) {
  const double d = std::clamp(duty, 0.0, 1.0);
  if (api.locomotion() == LocomotionModel::differential) {
    api.set_motors(-direction * d, direction * d);
  } else if (direction > 0.0) {
    api.set_motors(d, 0.0);
  } else {
    api.set_motors(0.0, d);
  }
}

}  // namespace

Rgb palette_color(std::uint32_t index) {
  static constexpr std::array<Rgb, 8> kPalette = {{{255, 0, 0},
                                                    {255, 128, 0},
                                                    {255, 255, 0},
                                                    {0, 255, 0},
                                                    {0, 255, 255},
                                                    {0, 0, 255},
                                                    {128, 0, 255},
                                                    {255, 0, 255}}};
  return kPalette[index % kPalette.size()];
}

void DemoProgram::on_signal(Api& api, const UserSignal& signal) {
  if (signal.code == kSignalStart) running_ = true;
  if (signal.code == kSignalStop) {
    running_ = false;
    api.set_motors(0.0, 0.0);
  }
  api.set_led(0, palette_color(signal.code));
}

// --- hop gradient ---------------------------------------------------------

void HopGradientProgram::setup(Api& api) {
  seed_ = api.param("seed") != 0.0;
  hop_ = seed_ ? 0 : kHopUnreached;
}

void HopGradientProgram::step(Api& api) {
  api.set_motors(0.0, 0.0);
  while (auto msg = api.receive_any()) {
    if (msg->type != MsgType::user || msg->payload.empty()) continue;
    const std::uint8_t heard = msg->payload[0];
    if (heard >= kHopUnreached - 1) continue;
    hop_ = std::min<std::uint8_t>(hop_, static_cast<std::uint8_t>(heard + 1));
  }
  if (running_) {
    const std::array<std::uint8_t, 1> payload = {hop_};
    api.send(payload, kAllFacesMask);
  }
  api.set_led(0, hop_ == kHopUnreached ? Rgb{} : palette_color(hop_));
}

std::vector<std::uint8_t> HopGradientProgram::save_state() const {
  return {hop_, static_cast<std::uint8_t>(seed_), static_cast<std::uint8_t>(running_)};
}

void HopGradientProgram::load_state(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 3) throw std::invalid_argument("state size mismatch");
  hop_ = bytes[0];
  seed_ = bytes[1] != 0;
  running_ = bytes[2] != 0;
}

// --- phototaxis -----------------------------------------------------------

void PhototaxisProgram::step(Api& api) {
  if (!running_) {
    api.set_motors(0.0, 0.0);
    return;
  }
  const double fr = api.photosensor(PhotoSensor::front_right);
  const double fl = api.photosensor(PhotoSensor::front_left);
  const double back = api.photosensor(PhotoSensor::back);

  arrived_ = fr >= 65535.0 || fl >= 65535.0;
  if (arrived_) {
    api.set_motors(0.0, 0.0);
    api.set_led(0, {0, 255, 0});
    return;
  }
  api.set_led(0, {255, 255, 0});
  if (back > std::max(fl, fr)) {
    spin(api, fl >= fr ? 1.0 : -1.0, 1.0);
    return;
  }
  const double total = fl + fr;
  const double turn = total > 0.0 ? std::clamp(kGain * (fl - fr) / total, -1.0, 1.0) : 0.0;
  drive(api, kCruise, turn);
}

std::vector<std::uint8_t> PhototaxisProgram::save_state() const {
  return {static_cast<std::uint8_t>(arrived_), static_cast<std::uint8_t>(running_)};
}

void PhototaxisProgram::load_state(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 2) throw std::invalid_argument("state size mismatch");
  arrived_ = bytes[0] != 0;
  running_ = bytes[1] != 0;
}

// --- run and tumble -------------------------------------------------------

void RunTumbleProgram::setup(Api& api) { start_run(api); }

void RunTumbleProgram::start_run(Api& api) {
  const double period_s = api.period_seconds();
  const double duration = api.random_exponential(kMeanRunSeconds);
  state_.tumbling = 0;
  state_.run_ticks_left = std::max<std::int64_t>(1, std::llround(duration / period_s));
  state_.last_duty = 0.0;
}

void RunTumbleProgram::start_tumble(Api& api) {
  const double angle = -std::numbers::pi + 2.0 * std::numbers::pi * api.random_uniform();
  state_.tumbling = 1;
  state_.remaining_angle = std::abs(angle);
  state_.turn_sign = angle >= 0.0 ? 1.0 : -1.0;
  state_.last_duty = 0.0;
}

void RunTumbleProgram::step(Api& api) {
  if (!running_) {
    api.set_motors(0.0, 0.0);
    return;
  }
  const double period_s = api.period_seconds();

  if (!state_.tumbling) {
    if (state_.run_ticks_left > 0) {
      --state_.run_ticks_left;
      api.set_motors(1.0, 1.0);
      api.set_led(0, {0, 0, 255});
      return;
    }
    start_tumble(api);
  } else if (state_.last_duty > 0.0) {
    const double rate = api.imu().gyro_z;
    state_.remaining_angle -= state_.turn_sign * rate * period_s;
    if (std::abs(rate) > 0.0) state_.omega_per_duty = std::abs(rate) / state_.last_duty;
  }

  if (state_.remaining_angle <= 1e-9) {
    start_run(api);
    --state_.run_ticks_left;
    api.set_motors(1.0, 1.0);
    api.set_led(0, {0, 0, 255});
    return;
  }
  double duty = 1.0;
  if (state_.omega_per_duty > 0.0) duty = std::min(1.0, state_.remaining_angle / (state_.omega_per_duty * period_s));
  spin(api, state_.turn_sign, duty);
  state_.last_duty = duty;
  api.set_led(0, {255, 0, 0});
}

std::vector<std::uint8_t> RunTumbleProgram::save_state() const {
  auto bytes = pack(state_);
  bytes.push_back(static_cast<std::uint8_t>(running_));
  return bytes;
}

void RunTumbleProgram::load_state(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw std::invalid_argument("state size mismatch");
  unpack(bytes.first(bytes.size() - 1), state_);
  running_ = bytes.back() != 0;
}

void register_demo_programs(ProgramRegistry& registry) {
  registry.add("idle", [] { return std::make_unique<IdleProgram>(); });
  registry.add("hop_gradient", [] { return std::make_unique<HopGradientProgram>(); });
  registry.add("phototaxis", [] { return std::make_unique<PhototaxisProgram>(); });
  registry.add("run_tumble", [] { return std::make_unique<RunTumbleProgram>(); });
}

}  // namespace pogosim
