#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pogosim/types.hpp"

namespace pogosim {

using Json = nlohmann::json;

enum class RecordKind : std::uint8_t {
  meta,
  command,
  pose,
  led,
  frame_tx,
  frame_rx,
  frame_drop,
  signal,
  program_swap,
  error,
  metric,
};

std::string_view to_string(RecordKind k);
std::optional<RecordKind> record_kind_from_string(std::string_view s);

/// Step phase a record was produced in; orders records within one tick.
enum class Phase : std::uint8_t {
  setup = 0,
  commands = 1,
  controllers = 2,
  actuation = 3,
  collisions = 4,
  channel = 5,
  sensors = 6,
  output = 7,
  metrics = 8,
};

/// One trace line. `fields` holds the kind-specific payload; numbers in it
/// should already be canonical (see canonical_number).
struct TraceRecord {
  std::uint64_t tick = 0;
  RecordKind kind = RecordKind::meta;
  EntityId id = 0;
  Json fields = Json::object();
  Phase phase = Phase::setup;  // not serialized

  Json to_json() const;
  /// Canonical JSON line without trailing newline: sorted keys, compact.
  std::string to_line() const;
  static TraceRecord from_json(const Json& j);
};

/// Rounds to 9 significant digits so serialized floats are platform stable.
double canonical_number(double v);
Json canonical_array(std::initializer_list<double> values);

/// FNV-1a 64-bit.
class Digest {
 public:
  void update(std::string_view bytes);
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string digest_hex(std::uint64_t value);

class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void write(const TraceRecord& record) = 0;
};

/// Serializes records as JSON Lines, applies the kind filter and keeps the
/// running digest over every written line (including its newline).
class TraceWriter final : public RecordSink {
 public:
  explicit TraceWriter(std::ostream* out = nullptr, std::set<RecordKind> kinds = {});

  void write(const TraceRecord& record) override;

  const Digest& digest() const { return digest_; }
  std::uint64_t lines() const { return lines_; }
  bool accepts(RecordKind k) const { return kinds_.empty() || kinds_.count(k) > 0; }

 private:
  std::ostream* out_;
  std::set<RecordKind> kinds_;
  Digest digest_;
  std::uint64_t lines_ = 0;
};

/// Forwards to several sinks.
class TeeSink final : public RecordSink {
 public:
  void add(RecordSink* sink) { sinks_.push_back(sink); }
  void write(const TraceRecord& record) override {
    for (RecordSink* s : sinks_) s->write(record);
  }

 private:
  std::vector<RecordSink*> sinks_;
};

/// Keeps every record in memory.
class MemorySink final : public RecordSink {
 public:
  void write(const TraceRecord& record) override { records.push_back(record); }
  std::vector<TraceRecord> records;
};

struct TraceReadResult {
  std::vector<TraceRecord> records;
  bool truncated = false;
  std::size_t bad_line = 0;           // 1-based line number of the first bad line
  std::uint64_t last_complete_tick = 0;  // last tick whose records were all read
  std::string error;
};

/// Reads a JSON Lines trace, stopping at the first malformed line.
TraceReadResult read_trace(std::istream& in);

}  // namespace pogosim
