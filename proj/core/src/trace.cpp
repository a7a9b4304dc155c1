#include "pogosim/trace.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

namespace pogosim {

namespace {

constexpr std::array<std::string_view, 11> kKindNames = {
    "meta", "command", "pose", "led", "frame_tx", "frame_rx", "frame_drop", "signal", "program_swap", "error", "metric"};

}  // namespace

std::string_view to_string(RecordKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<RecordKind> record_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<RecordKind>(i);
  }
  return std::nullopt;
}

double canonical_number(double v) {
  if (!std::isfinite(v)) return 0.0;
  if (v == 0.0) return 0.0;  // folds -0
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.9g", v);
  const double r = std::strtod(buf.data(), nullptr);
  return r == 0.0 ? 0.0 : r;
}

Json canonical_array(std::initializer_list<double> values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(canonical_number(v));
  return arr;
}

Json TraceRecord::to_json() const {
  Json j = fields.is_object() ? fields : Json::object();
  j["tick"] = tick;
  j["kind"] = std::string(to_string(kind));
  j["id"] = id;
  return j;
}

std::string TraceRecord::to_line() const { return to_json().dump(); }

TraceRecord TraceRecord::from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("trace record must be an object");
  TraceRecord r;
  r.tick = j.at("tick").get<std::uint64_t>();
  const auto kind = record_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown record kind");
  r.kind = *kind;
  r.id = j.at("id").get<EntityId>();
  r.fields = j;
  r.fields.erase("tick");
  r.fields.erase("kind");
  r.fields.erase("id");
  return r;
}

void Digest::update(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
}

std::string digest_hex(std::uint64_t value) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(value));
  return buf.data();
}

std::string Digest::hex() const { return digest_hex(state_); }

TraceWriter::TraceWriter(std::ostream* out, std::set<RecordKind> kinds) : out_(out), kinds_(std::move(kinds)) {}

void TraceWriter::write(const TraceRecord& record) {
  if (!accepts(record.kind)) return;
  std::string line = record.to_line();
  line.push_back('\n');
  digest_.update(line);
  ++lines_;
  if (out_ != nullptr) {
    out_->write(line.data(), static_cast<std::streamsize>(line.size()));
  }
}

TraceReadResult read_trace(std::istream& in) {
  TraceReadResult result;
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t last_tick = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      TraceRecord r = TraceRecord::from_json(j);
      if (!result.records.empty() && r.tick < last_tick) throw std::invalid_argument("tick went backwards");
      last_tick = r.tick;
      result.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      result.truncated = true;
      result.bad_line = line_no;
      result.error = e.what();
      break;
    }
  }
  if (result.records.empty()) {
    result.last_complete_tick = 0;
  } else if (result.truncated) {
    // The damaged line may belong to the last tick seen.
    result.last_complete_tick = last_tick > 0 ? last_tick - 1 : 0;
  } else {
    result.last_complete_tick = last_tick;
  }
  return result;
}

}  // namespace pogosim
