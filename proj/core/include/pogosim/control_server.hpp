#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "pogosim/firmware.hpp"
#include "pogosim/scenario.hpp"

namespace pogosim {

struct ServeOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;        // 0 picks a free port
  double timescale = 1.0;        // simulated seconds per wall second
  bool start_paused = false;
  double snapshot_hz = 30.0;     // upper bound on the snapshot stream rate
  std::ostream* trace = nullptr;
};

/// Protocol version sent in the hello message.
inline constexpr int kControlProtocolVersion = 1;

/// WebSocket control endpoint around a paced simulation.
///
/// Messages are JSON text frames with envelope {type, seq, payload}.
/// Client requests: pause, resume, single_step, set_timescale {factor},
/// shower.set_pose {x, y, theta}, shower.emit_signal {code, payload},
/// shower.program {program}, inspect {id}. The server answers each request
/// with "ack" or "error" carrying the request seq, and streams "snapshot"
/// messages. World commands are applied in phase 1 of the tick named by
/// `apply_tick` in their ack.
class ControlServer {
 public:
  ControlServer(ScenarioConfig config, ServeOptions options,
                ProgramRegistry registry = ProgramRegistry::with_builtins());
  ~ControlServer();

  ControlServer(const ControlServer&) = delete;
  ControlServer& operator=(const ControlServer&) = delete;

  /// Binds the listener and starts the network and simulation threads.
  void start();
  /// Stops both threads and appends the end-of-run metric records to the trace.
  void stop();

  std::uint16_t port() const;
  std::uint64_t tick() const;
  bool paused() const;
  /// Every accepted world command with the tick it was applied at.
  std::vector<ScriptEntry> recorded_script() const;
  /// Digest of the trace written so far; final after stop().
  std::string digest() const;
  std::size_t dropped_snapshots() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pogosim
