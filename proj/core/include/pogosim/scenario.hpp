#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pogosim/firmware.hpp"
#include "pogosim/trace.hpp"
#include "pogosim/world.hpp"

namespace pogosim {

/// Scenario rejected by the parser. `path` locates the offending entity,
/// e.g. "robots[3].pose"; empty for syntax errors.
class ScenarioError : public std::runtime_error {
 public:
  enum class Kind : std::uint8_t { syntax, semantic, unknown_key };

  ScenarioError(Kind kind, std::string path, const std::string& message);

  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

/// A command scheduled at a tick by the scenario script.
struct ScriptEntry {
  std::uint64_t tick = 0;
  IssuedCommand command;
};

struct ScenarioConfig {
  WorldConfig world;
  double duration = 0.0;  // s
  std::set<RecordKind> trace_kinds;  // empty keeps every kind
  std::vector<ScriptEntry> script;    // sorted by tick, stable

  std::uint64_t duration_ticks() const;
};

/// Parses and validates a JSON scenario. Unknown keys are errors.
ScenarioConfig parse_scenario(std::string_view text, const ProgramRegistry& registry = ProgramRegistry::with_builtins());
ScenarioConfig load_scenario(const std::string& path, const ProgramRegistry& registry = ProgramRegistry::with_builtins());

/// Appends script entries ({tick | at, command, payload, source}) and keeps the
/// script sorted by tick. `path` prefixes error locations.
void append_script(ScenarioConfig& cfg, const Json& script, const std::string& path,
                   const ProgramRegistry& registry = ProgramRegistry::with_builtins());
Json script_to_json(const std::vector<ScriptEntry>& script);

/// Parses a comma separated kind list such as "pose,frame_rx".
std::set<RecordKind> parse_kind_list(std::string_view list);

}  // namespace pogosim
