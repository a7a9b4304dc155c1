#include "pogosim/ir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pogosim {

double face_azimuth(FaceId f) { return static_cast<double>(face_index(f)) * std::numbers::pi / 2.0; }

std::string_view to_string(FaceId f) {
  switch (f) {
    case FaceId::front: return "front";
    case FaceId::left: return "left";
    case FaceId::back: return "back";
    case FaceId::right: return "right";
  }
  return "?";
}

std::string_view to_string(MsgType t) {
  switch (t) {
    case MsgType::user: return "user";
    case MsgType::wall_beacon: return "wall_beacon";
    case MsgType::shower_signal: return "shower_signal";
    case MsgType::program: return "program";
  }
  return "?";
}

MsgType msg_type_from_string(std::string_view s) {
  if (s == "user") return MsgType::user;
  if (s == "wall_beacon") return MsgType::wall_beacon;
  if (s == "shower_signal") return MsgType::shower_signal;
  if (s == "program") return MsgType::program;
  throw std::invalid_argument("unknown msg_type '" + std::string(s) + "'");
}

std::string_view to_string(CollisionPolicy p) { return p == CollisionPolicy::destructive ? "destructive" : "capture"; }

CollisionPolicy collision_policy_from_string(std::string_view s) {
  if (s == "destructive") return CollisionPolicy::destructive;
  if (s == "capture") return CollisionPolicy::capture;
  throw std::invalid_argument("unknown collision policy '" + std::string(s) + "'");
}

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data) {
    crc ^= static_cast<std::uint16_t>(byte) << 8;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021) : static_cast<std::uint16_t>(crc << 1);
    }
  }
  return crc;
}

std::vector<std::uint8_t> encode_frame(const IrFrame& frame) {
  if (frame.payload.size() > kMaxPayload) throw std::invalid_argument("payload exceeds 64 bytes");
  if (frame.tx_face_mask == 0 || frame.tx_face_mask > kAllFacesMask) throw std::invalid_argument("bad tx_face_mask");
  if (frame.sender > kMaxEntityId) throw std::invalid_argument("sender id does not fit in 16 bits");
  std::vector<std::uint8_t> out;
  out.reserve(kWireHeaderBytes + frame.payload.size() + 2);
  out.push_back(static_cast<std::uint8_t>(frame.sender & 0xFF));
  out.push_back(static_cast<std::uint8_t>((frame.sender >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>(frame.seq & 0xFF));
  out.push_back(static_cast<std::uint8_t>(frame.seq >> 8));
  out.push_back(static_cast<std::uint8_t>(frame.msg_type));
  out.push_back(frame.tx_face_mask);
  out.push_back(static_cast<std::uint8_t>(frame.payload.size()));
  out.push_back(0);
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  const std::uint16_t crc = crc16_ccitt_false(out);
  out.push_back(static_cast<std::uint8_t>(crc & 0xFF));
  out.push_back(static_cast<std::uint8_t>(crc >> 8));
  return out;
}

std::optional<IrFrame> decode_frame(std::span<const std::uint8_t> wire) {
  if (wire.size() < kWireHeaderBytes + 2) return std::nullopt;
  const std::size_t len = wire[6];
  if (len > kMaxPayload || wire.size() != kWireHeaderBytes + len + 2) return std::nullopt;
  const std::uint16_t crc = static_cast<std::uint16_t>(wire[wire.size() - 2] | (wire[wire.size() - 1] << 8));
  if (crc != crc16_ccitt_false(wire.first(wire.size() - 2))) return std::nullopt;
  if (wire[4] > static_cast<std::uint8_t>(MsgType::program)) return std::nullopt;
  IrFrame f;
  f.sender = static_cast<EntityId>(wire[0] | (wire[1] << 8));
  f.seq = static_cast<std::uint16_t>(wire[2] | (wire[3] << 8));
  f.msg_type = static_cast<MsgType>(wire[4]);
  f.tx_face_mask = wire[5];
  f.payload.assign(wire.begin() + kWireHeaderBytes, wire.begin() + kWireHeaderBytes + len);
  return f;
}

void ChannelParams::validate() const {
  if (!(range > 0.0)) throw std::invalid_argument("channel range must be > 0");
  if (!(tx_half_angle > 0.0 && tx_half_angle <= 90.0)) throw std::invalid_argument("tx_half_angle must be in (0, 90]");
  if (!(rx_half_angle > 0.0 && rx_half_angle <= 90.0)) throw std::invalid_argument("rx_half_angle must be in (0, 90]");
  if (!(bitrate > 0.0)) throw std::invalid_argument("bitrate must be > 0");
}

double airtime(std::size_t payload_len, const ChannelParams& params) {
  return static_cast<double>(params.header_bytes + payload_len + 2) * 8.0 / params.bitrate;
}

std::int64_t airtime_ns(std::size_t payload_len, const ChannelParams& params) {
  return std::llround(airtime(payload_len, params) * 1e9);
}

bool within_cone(double bearing, double center, double half_angle) {
  return std::abs(wrap_angle(bearing - center)) <= half_angle;
}

FaceSet arrival_faces(const Pose2D& rx_pose, Vec2 source, double rx_half_angle_rad) {
  const double arrival = body_bearing(rx_pose, source);
  FaceSet out = 0;
  for (FaceId f : kAllFaces) {
    if (within_cone(arrival, face_azimuth(f), rx_half_angle_rad)) out |= face_bit(f);
  }
  return out;
}

bool line_of_sight(Vec2 from, Vec2 to, const Occluders& occluders, std::span<const EntityId> exclude,
                   std::span<const std::size_t> exclude_walls) {
  const Segment path{from, to};
  for (const BodyDisc& d : occluders.discs) {
    if (std::find(exclude.begin(), exclude.end(), d.id) != exclude.end()) continue;
    if (segment_intersects_disc(path, d.pose.position(), d.radius)) return false;
  }
  for (std::size_t i = 0; i < occluders.walls.size(); ++i) {
    if (std::find(exclude_walls.begin(), exclude_walls.end(), i) != exclude_walls.end()) continue;
    if (segments_intersect(path, occluders.walls[i])) return false;
  }
  return true;
}

FaceSet reachable_faces(const Pose2D& tx_pose, FaceId tx_face, const Pose2D& rx_pose, const ChannelParams& params,
                        const Occluders& occluders, EntityId tx_id, EntityId rx_id) {
  return reachable_faces_mask(tx_pose, face_bit(tx_face), rx_pose, params, occluders, tx_id, rx_id);
}

FaceSet reachable_faces_mask(const Pose2D& tx_pose, std::uint8_t tx_mask, const Pose2D& rx_pose,
                             const ChannelParams& params, const Occluders& occluders, EntityId tx_id, EntityId rx_id) {
  const Vec2 d = rx_pose.position() - tx_pose.position();
  if (norm(d) > params.range) return 0;
  const double bearing = body_bearing(tx_pose, rx_pose.position());
  const double tx_half = deg_to_rad(params.tx_half_angle);
  bool emitted = false;
  for (FaceId f : kAllFaces) {
    if ((tx_mask & face_bit(f)) && within_cone(bearing, face_azimuth(f), tx_half)) {
      emitted = true;
      break;
    }
  }
  if (!emitted) return 0;
  const std::array<EntityId, 2> ends = {tx_id, rx_id};
  if (!line_of_sight(tx_pose.position(), rx_pose.position(), occluders, ends)) return 0;
  return arrival_faces(rx_pose, tx_pose.position(), deg_to_rad(params.rx_half_angle));
}

bool survives(const Reception& target, std::span<const Reception> interferers, CollisionPolicy policy) {
  if (interferers.empty()) return true;
  if (policy == CollisionPolicy::destructive) return false;
  for (const Reception& r : interferers) {
    if (!(target.distance < r.distance)) return false;
  }
  // The nearest sender is captured only if its window spans every interval
  // during which the receiver sees more than one signal.
  std::int64_t span_lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t span_hi = std::numeric_limits<std::int64_t>::min();
  auto extend = [&](const Reception& a, const Reception& b) {
    if (!windows_overlap(a, b)) return;
    span_lo = std::min(span_lo, std::max(a.t_start_ns, b.t_start_ns));
    span_hi = std::max(span_hi, std::min(a.t_end_ns, b.t_end_ns));
  };
  for (std::size_t i = 0; i < interferers.size(); ++i) {
    extend(target, interferers[i]);
    for (std::size_t j = i + 1; j < interferers.size(); ++j) extend(interferers[i], interferers[j]);
  }
  return target.t_start_ns <= span_lo && span_hi <= target.t_end_ns;
}

std::vector<bool> arbitrate(std::span<const Reception> receptions, CollisionPolicy policy) {
  std::vector<bool> out(receptions.size());
  std::vector<Reception> others;
  for (std::size_t i = 0; i < receptions.size(); ++i) {
    others.clear();
    for (std::size_t j = 0; j < receptions.size(); ++j) {
      if (i != j && windows_overlap(receptions[i], receptions[j])) others.push_back(receptions[j]);
    }
    out[i] = survives(receptions[i], others, policy);
  }
  return out;
}

}  // namespace pogosim
