#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "pogosim/trace.hpp"

using namespace pogosim;

namespace {

// Reference FNV-1a 64 over a byte string.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

TraceRecord pose_record(std::uint64_t tick, EntityId id, double x) {
  return {tick, RecordKind::pose, id, {{"x", canonical_number(x)}, {"y", 0.0}, {"theta", 0.0}}, Phase::output};
}

}  // namespace

TEST(Digest, KnownVectors) {
  Digest empty;
  EXPECT_EQ(empty.hex(), "cbf29ce484222325");
  Digest a;
  a.update("a");
  EXPECT_EQ(a.hex(), "af63dc4c8601ec8c");
  Digest foobar;
  foobar.update("foo");
  foobar.update("bar");
  EXPECT_EQ(foobar.value(), fnv1a("foobar"));
  EXPECT_EQ(digest_hex(0x1), "0000000000000001");
}

TEST(CanonicalNumber, NineSignificantDigits) {
  EXPECT_EQ(canonical_number(0.1 + 0.2), 0.3);
  EXPECT_EQ(canonical_number(1.23456789012), 1.23456789);
  EXPECT_EQ(canonical_number(-9.87654321987e-5), -9.87654322e-5);
  EXPECT_EQ(canonical_number(0.0), 0.0);
  EXPECT_EQ(canonical_number(123456789012.0), 123456789000.0);
}

TEST(TraceRecord, CanonicalLineHasSortedKeys) {
  TraceRecord r{7, RecordKind::led, 3, {{"rgb", {255, 0, 0}}, {"led", 1}}, Phase::controllers};
  EXPECT_EQ(r.to_line(), R"({"id":3,"kind":"led","led":1,"rgb":[255,0,0],"tick":7})");
  const TraceRecord back = TraceRecord::from_json(Json::parse(r.to_line()));
  EXPECT_EQ(back.tick, 7u);
  EXPECT_EQ(back.kind, RecordKind::led);
  EXPECT_EQ(back.id, 3u);
  EXPECT_EQ(back.to_line(), r.to_line());
}

TEST(TraceRecord, KindNamesRoundTrip) {
  for (int k = 0; k <= static_cast<int>(RecordKind::metric); ++k) {
    const auto kind = static_cast<RecordKind>(k);
    EXPECT_EQ(record_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_FALSE(record_kind_from_string("nonsense").has_value());
}

TEST(TraceWriter, DigestCoversWrittenBytes) {
  std::ostringstream out;
  TraceWriter w(&out);
  w.write(pose_record(0, 0, 0.5));
  w.write(pose_record(1, 0, 0.25));
  EXPECT_EQ(w.lines(), 2u);
  EXPECT_EQ(w.digest().value(), fnv1a(out.str()));
  EXPECT_EQ(out.str().back(), '\n');
}

TEST(TraceWriter, KindFilter) {
  std::ostringstream out;
  TraceWriter w(&out, {RecordKind::led});
  w.write(pose_record(0, 0, 0.5));
  w.write({0, RecordKind::led, 0, {{"led", 0}, {"rgb", {0, 0, 0}}}, Phase::controllers});
  EXPECT_EQ(w.lines(), 1u);
  EXPECT_EQ(out.str().find("pose"), std::string::npos);
}

TEST(TraceWriter, NullStreamStillDigests) {
  TraceWriter a(nullptr);
  std::ostringstream out;
  TraceWriter b(&out);
  a.write(pose_record(3, 1, 0.1));
  b.write(pose_record(3, 1, 0.1));
  EXPECT_EQ(a.digest().value(), b.digest().value());
}

TEST(ReadTrace, CompleteFile) {
  std::ostringstream out;
  TraceWriter w(&out);
  for (std::uint64_t t = 0; t < 5; ++t) w.write(pose_record(t, 0, 0.1 * t));
  std::istringstream in(out.str());
  const TraceReadResult r = read_trace(in);
  EXPECT_FALSE(r.truncated);
  EXPECT_EQ(r.records.size(), 5u);
  EXPECT_EQ(r.last_complete_tick, 4u);
}

TEST(ReadTrace, CorruptFinalLine) {
  std::ostringstream out;
  TraceWriter w(&out);
  for (std::uint64_t t = 0; t < 5; ++t) {
    w.write(pose_record(t, 0, 0.1));
    w.write(pose_record(t, 1, 0.2));
  }
  std::string text = out.str();
  text.resize(text.size() - 9);
  std::istringstream in(text);
  const TraceReadResult r = read_trace(in);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.bad_line, 10u);
  EXPECT_EQ(r.last_complete_tick, 3u);
  EXPECT_EQ(r.records.size(), 9u);
  EXPECT_FALSE(r.error.empty());
}

TEST(ReadTrace, GarbageInTheMiddleStopsThere) {
  std::istringstream in(pose_record(0, 0, 0.1).to_line() + "\n" + "{not json\n" + pose_record(1, 0, 0.1).to_line() +
                        "\n");
  const TraceReadResult r = read_trace(in);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.bad_line, 2u);
  EXPECT_EQ(r.records.size(), 1u);
}
