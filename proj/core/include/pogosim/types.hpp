#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "pogosim/geometry.hpp"

namespace pogosim {

using EntityId = std::uint32_t;
/// Entity ids travel in 16-bit frame headers.
inline constexpr EntityId kMaxEntityId = 0xFFFF;

inline constexpr double kRobotRadius = 0.03;  // 6 cm diameter

enum class BodyKind : std::uint8_t { robot, pogobject, shower };

/// Disc collider. `movable` means the body is displaced by collision projection.
struct BodyDisc {
  EntityId id = 0;
  BodyKind kind = BodyKind::robot;
  double radius = kRobotRadius;
  Pose2D pose;
  bool movable = true;
};

/// Fixed-step clock. All time is integer ticks; seconds are derived.
class SimClock {
 public:
  SimClock() = default;
  SimClock(std::int64_t dt_ns, std::int64_t controller_period_ticks)
      : dt_ns_(dt_ns), controller_period_ticks_(controller_period_ticks) {
    if (dt_ns <= 0) throw std::invalid_argument("dt must be positive");
    if (controller_period_ticks <= 0) throw std::invalid_argument("controller period must be a positive tick count");
  }

  std::uint64_t tick() const { return tick_; }
  std::int64_t dt_ns() const { return dt_ns_; }
  double dt() const { return static_cast<double>(dt_ns_) * 1e-9; }
  std::int64_t controller_period_ticks() const { return controller_period_ticks_; }
  double controller_period() const { return dt() * static_cast<double>(controller_period_ticks_); }
  std::int64_t now_ns() const { return static_cast<std::int64_t>(tick_) * dt_ns_; }
  double time() const { return static_cast<double>(now_ns()) * 1e-9; }
  bool is_controller_tick() const { return tick_ % static_cast<std::uint64_t>(controller_period_ticks_) == 0; }

  void advance() { ++tick_; }
  void set_tick(std::uint64_t t) { tick_ = t; }

 private:
  std::uint64_t tick_ = 0;
  std::int64_t dt_ns_ = 1'000'000;
  std::int64_t controller_period_ticks_ = 33;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

/// LED 0 is the HEAD user-feedback LED; 1..4 are the BELLY LEDs facing
/// front, left, back and right.
inline constexpr std::size_t kLedCount = 5;
using LedArray = std::array<Rgb, kLedCount>;

}  // namespace pogosim
