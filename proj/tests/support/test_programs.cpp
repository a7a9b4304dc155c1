#include "test_programs.hpp"

#include <stdexcept>

namespace pogosim::fixtures {

void ConstantDriveProgram::step(Api& api) { api.set_motors(api.param("left"), api.param("right")); }

void BurstSenderProgram::step(Api& api) {
  while (api.receive_any()) {
  }
  const auto interval = static_cast<std::uint64_t>(api.param("interval", 1.0));
  if (ticks_++ % interval != 0) return;
  const auto frames = static_cast<int>(api.param("frames", 4.0));
  const auto len = static_cast<std::size_t>(api.param("payload_len", 1.0));
  for (int i = 0; i < frames; ++i) {
    std::vector<std::uint8_t> payload(len, counter_++);
    api.send(payload);
  }
}

void ThrowingProgram::step(Api& api) {
  if (steps_ >= static_cast<int>(api.param("throw_after"))) throw std::runtime_error("boom");
  ++steps_;
  api.set_motors(1.0, 1.0);
}

void CountingProgram::step(Api&) { ++steps_; }

std::vector<std::uint8_t> CountingProgram::save_state() const {
  return {static_cast<std::uint8_t>(steps_ & 0xFF), static_cast<std::uint8_t>((steps_ >> 8) & 0xFF)};
}

ProgramRegistry test_registry() {
  ProgramRegistry r = ProgramRegistry::with_builtins();
  r.add("constant_drive", [] { return std::make_unique<ConstantDriveProgram>(); });
  r.add("burst_sender", [] { return std::make_unique<BurstSenderProgram>(); });
  r.add("throwing", [] { return std::make_unique<ThrowingProgram>(); });
  r.add("counting", [] { return std::make_unique<CountingProgram>(); });
  return r;
}

MotionModelParams noiseless(LocomotionModel model) {
  MotionModelParams p;
  p.model = model;
  p.noise_v = 0.0;
  p.noise_omega = 0.0;
  p.bias_std = 0.0;
  return p;
}

WorldConfig empty_world(double width, double height, std::uint64_t seed) {
  WorldConfig cfg;
  cfg.arena = Polygon::rectangle(width, height);
  cfg.seed = seed;
  cfg.shower.pose = {-width / 2 + 0.01, -height / 2 + 0.01, 0.0};
  return cfg;
}

RobotSpec robot_at(double x, double y, double theta, std::string program, LocomotionModel model) {
  RobotSpec r;
  r.pose = make_pose(x, y, theta);
  r.program = std::move(program);
  r.motion.model = model;
  return r;
}

std::vector<TraceRecord> records_of(const std::vector<TraceRecord>& records, RecordKind kind) {
  std::vector<TraceRecord> out;
  for (const TraceRecord& r : records) {
    if (r.kind == kind) out.push_back(r);
  }
  return out;
}

}  // namespace pogosim::fixtures
