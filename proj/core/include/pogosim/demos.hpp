#pragma once

#include <cstdint>

#include "pogosim/firmware.hpp"

namespace pogosim {

class ProgramRegistry;

inline constexpr std::uint8_t kHopUnreached = 255;

/// Signal codes understood by the demo programs.
inline constexpr std::uint8_t kSignalStart = 1;
inline constexpr std::uint8_t kSignalStop = 2;

Rgb palette_color(std::uint32_t index);

class IdleProgram final : public Program {
 public:
  void step(Api& api) override { api.set_motors(0.0, 0.0); }
};

/// Common start/stop and signal LED handling for the demos. Any signal paints
/// the HEAD LED with the palette color of its code.
class DemoProgram : public Program {
 public:
  void on_signal(Api& api, const UserSignal& signal) override;

 protected:
  bool running_ = true;
};

/// Min-plus hop count towards the robot whose "seed" param is nonzero.
class HopGradientProgram final : public DemoProgram {
 public:
  void setup(Api& api) override;
  void step(Api& api) override;
  std::vector<std::uint8_t> save_state() const override;
  void load_state(std::span<const std::uint8_t> bytes) override;

  std::uint8_t hop() const { return hop_; }

 private:
  std::uint8_t hop_ = kHopUnreached;
  bool seed_ = false;
};

/// Steers towards the brighter front photosensor, spins when the back one is
/// brightest and stops when the front sensors saturate.
class PhototaxisProgram final : public DemoProgram {
 public:
  void step(Api& api) override;
  std::vector<std::uint8_t> save_state() const override;
  void load_state(std::span<const std::uint8_t> bytes) override;

  static constexpr double kGain = 25.0;
  static constexpr double kCruise = 0.75;

 private:
  bool arrived_ = false;
};

/// Straight runs of exponential duration alternating with tumbles of a uniform
/// random angle in [-pi, pi). Tumble progress is tracked by integrating the gyro.
class RunTumbleProgram final : public DemoProgram {
 public:
  void setup(Api& api) override;
  void step(Api& api) override;
  std::vector<std::uint8_t> save_state() const override;
  void load_state(std::span<const std::uint8_t> bytes) override;

  static constexpr double kMeanRunSeconds = 5.0;

  bool tumbling() const { return state_.tumbling != 0; }

 private:
  void start_run(Api& api);
  void start_tumble(Api& api);

  struct State {
    std::uint8_t tumbling = 0;
    std::int64_t run_ticks_left = 0;
    double remaining_angle = 0.0;
    double turn_sign = 1.0;
    double last_duty = 0.0;
    double omega_per_duty = 0.0;  // learned from the gyro
  };
  State state_;
};

void register_demo_programs(ProgramRegistry& registry);

}  // namespace pogosim
