#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "pogosim/trace.hpp"
#include "pogosim/world.hpp"

namespace pogosim {

struct ReplayResult {
  Json meta;
  std::vector<SnapshotView> snapshots;  // one per tick carrying pose records
  std::vector<TraceRecord> records;     // input records that pass the kind filter
  bool truncated = false;
  std::size_t bad_line = 0;
  std::uint64_t last_complete_tick = 0;
  std::string error;
};

/// Rebuilds the observable state from a trace without re-simulating.
/// Records after a malformed line are ignored and so are ticks that may
/// have been cut short by it.
ReplayResult replay_trace(std::istream& in, const std::set<RecordKind>& kinds = {});
ReplayResult replay_records(TraceReadResult read, const std::set<RecordKind>& kinds = {});

}  // namespace pogosim
