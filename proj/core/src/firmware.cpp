#include "pogosim/firmware.hpp"

#include <exception>
#include <stdexcept>

#include "pogosim/demos.hpp"

namespace pogosim {

std::string_view to_string(SignalOrigin o) {
  switch (o) {
    case SignalOrigin::shower: return "shower";
    case SignalOrigin::wall: return "wall";
    case SignalOrigin::script: return "script";
  }
  return "?";
}

double Api::param(std::string_view name, double fallback) const {
  const auto it = io_.params.find(name);
  return it == io_.params.end() ? fallback : it->second;
}

std::optional<ReceivedMessage> Api::receive(FaceId face) {
  auto& q = io_.inbox[face_index(face)];
  if (q.empty()) return std::nullopt;
  ReceivedMessage m = std::move(q.front());
  q.pop_front();
  return m;
}

std::optional<ReceivedMessage> Api::receive_any() {
  for (FaceId f : kAllFaces) {
    if (auto m = receive(f)) return m;
  }
  return std::nullopt;
}

bool Api::send(std::span<const std::uint8_t> payload, std::uint8_t face_mask) {
  if (io_.outbox.size() >= kMaxSendsPerTick || payload.size() > kMaxPayload || face_mask == 0 ||
      face_mask > kAllFacesMask) {
    ++io_.rejected_sends;
    return false;
  }
  io_.outbox.push_back({std::vector<std::uint8_t>(payload.begin(), payload.end()), face_mask});
  return true;
}

void Api::set_motors(double left, double right) {
  io_.motors.left = left;
  io_.motors.right = right;
}

void Api::set_led(std::size_t index, Rgb color) {
  if (index >= kLedCount) throw std::out_of_range("led index out of range");
  io_.leds[index] = color;
}

ProgramRegistry ProgramRegistry::with_builtins() {
  ProgramRegistry r;
  register_demo_programs(r);
  return r;
}

void ProgramRegistry::add(std::string name, ProgramFactory factory) { factories_[std::move(name)] = std::move(factory); }

bool ProgramRegistry::contains(std::string_view name) const { return factories_.find(name) != factories_.end(); }

std::unique_ptr<Program> ProgramRegistry::create(std::string_view name) const {
  const auto it = factories_.find(name);
  if (it == factories_.end()) return nullptr;
  return it->second();
}

std::vector<std::string> ProgramRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

bool load_program(ControllerSlot& slot, std::string_view program_id, const ProgramRegistry& registry) {
  auto program = registry.create(program_id);
  if (!program) return false;
  slot.program_id = std::string(program_id);
  slot.program = std::move(program);
  slot.ticks_since_swap = 0;
  slot.started = false;
  slot.halted = false;
  slot.missing_reported = false;
  return true;
}

ControllerTickResult tick_controller(ControllerSlot& slot, RobotIo& io, const ProgramRegistry& registry) {
  ControllerTickResult result;
  io.outbox.clear();
  io.rejected_sends = 0;
  if (slot.halted) return result;

  if (!slot.program) {
    slot.program = registry.create(slot.program_id);
    if (!slot.program) {
      if (!slot.missing_reported) {
        result.errors.push_back("unknown program '" + slot.program_id + "', running idle");
        slot.missing_reported = true;
      }
      slot.program = std::make_unique<IdleProgram>();
    }
  }

  Api api(io);
  try {
    if (!slot.started) {
      slot.started = true;
      slot.program->setup(api);
    }
    while (!io.signals.empty()) {
      UserSignal s = std::move(io.signals.front());
      io.signals.pop_front();
      slot.program->on_signal(api, s);
    }
    slot.program->step(api);
  } catch (const std::exception& e) {
    slot.halted = true;
    result.halted_now = true;
    result.errors.push_back(std::string("controller halted: ") + e.what());
  } catch (...) {
    slot.halted = true;
    result.halted_now = true;
    result.errors.push_back("controller halted: unknown exception");
  }
  ++slot.ticks_since_swap;

  if (slot.halted) {
    io.motors = {};
    io.outbox.clear();
    return result;
  }
  io.motors = clamp_command(io.motors, io.model);
  if (io.rejected_sends > 0) {
    result.errors.push_back("send overflow: " + std::to_string(io.rejected_sends) + " frame(s) rejected");
  }
  return result;
}

}  // namespace pogosim
