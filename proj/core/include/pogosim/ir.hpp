#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pogosim/geometry.hpp"
#include "pogosim/types.hpp"

namespace pogosim {

enum class FaceId : std::uint8_t { front = 0, left = 1, back = 2, right = 3 };
inline constexpr std::size_t kFaceCount = 4;
inline constexpr std::array<FaceId, kFaceCount> kAllFaces = {FaceId::front, FaceId::left, FaceId::back, FaceId::right};
inline constexpr std::uint8_t kAllFacesMask = 0x0F;

constexpr std::uint8_t face_bit(FaceId f) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(f)); }
constexpr std::size_t face_index(FaceId f) { return static_cast<std::size_t>(f); }
/// Face azimuth in the body frame, radians: face * 90 deg.
double face_azimuth(FaceId f);
std::string_view to_string(FaceId f);

using FaceSet = std::uint8_t;  // bit i set = FaceId(i)

enum class MsgType : std::uint8_t { user = 0, wall_beacon = 1, shower_signal = 2, program = 3 };
std::string_view to_string(MsgType t);
MsgType msg_type_from_string(std::string_view s);

inline constexpr std::size_t kMaxPayload = 64;
inline constexpr std::size_t kWireHeaderBytes = 8;

/// Beacon payloads start with a source-kind byte followed by the u16 LE id.
enum class BeaconSource : std::uint8_t { wall = 0, object = 1 };

struct IrFrame {
  EntityId sender = 0;
  std::uint8_t tx_face_mask = kAllFacesMask;
  std::uint16_t seq = 0;
  MsgType msg_type = MsgType::user;
  std::vector<std::uint8_t> payload;

  bool operator==(const IrFrame&) const = default;
};

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no xorout.
std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data);

/// Wire layout:
///   [sender:u16 LE][seq:u16 LE][msg_type:u8][tx_face_mask:u8][len:u8][reserved:u8]
///   payload[len] [crc:u16 LE over header+payload]
std::vector<std::uint8_t> encode_frame(const IrFrame& frame);
/// Returns nullopt on short buffer, length mismatch, oversize payload or CRC failure.
std::optional<IrFrame> decode_frame(std::span<const std::uint8_t> wire);

enum class CollisionPolicy : std::uint8_t { destructive, capture };
std::string_view to_string(CollisionPolicy p);
CollisionPolicy collision_policy_from_string(std::string_view s);

struct ChannelParams {
  double range = 0.25;           // m, robot to robot
  double tx_half_angle = 60.0;   // deg
  double rx_half_angle = 60.0;   // deg
  double bitrate = 76800.0;      // bit/s
  std::uint32_t header_bytes = 8;
  CollisionPolicy collision_policy = CollisionPolicy::destructive;

  void validate() const;
};

/// Airtime in seconds: (header + payload + crc) * 8 / bitrate.
double airtime(std::size_t payload_len, const ChannelParams& params);
inline double airtime(const IrFrame& frame, const ChannelParams& params) {
  return airtime(frame.payload.size(), params);
}
std::int64_t airtime_ns(std::size_t payload_len, const ChannelParams& params);

/// True if angle `bearing` lies within `half_angle` of `center` (radians, inclusive).
bool within_cone(double bearing, double center, double half_angle);

/// Receive faces of `rx` whose acceptance cone contains the direction towards `source`.
FaceSet arrival_faces(const Pose2D& rx_pose, Vec2 source, double rx_half_angle_rad);

/// Bodies and wall segments that can block a line of sight.
struct Occluders {
  std::span<const BodyDisc> discs;
  std::span<const Segment> walls;
};

/// Line-of-sight test between two points. Discs whose id is in `exclude` are ignored,
/// as are walls at the given indices in `exclude_walls`.
bool line_of_sight(Vec2 from, Vec2 to, const Occluders& occluders, std::span<const EntityId> exclude,
                   std::span<const std::size_t> exclude_walls = {});

/// Faces of the receiver reached by a transmission from `tx_face` of the sender.
FaceSet reachable_faces(const Pose2D& tx_pose, FaceId tx_face, const Pose2D& rx_pose, const ChannelParams& params,
                        const Occluders& occluders, EntityId tx_id, EntityId rx_id);

/// Union over all faces in `tx_mask`.
FaceSet reachable_faces_mask(const Pose2D& tx_pose, std::uint8_t tx_mask, const Pose2D& rx_pose,
                             const ChannelParams& params, const Occluders& occluders, EntityId tx_id, EntityId rx_id);

/// One reception candidate at a single receiver face.
struct Reception {
  std::int64_t t_start_ns = 0;
  std::int64_t t_end_ns = 0;
  double distance = 0.0;
};

/// Decides which receptions at one face survive. Returns one flag per input.
std::vector<bool> arbitrate(std::span<const Reception> receptions, CollisionPolicy policy);

/// Fate of a single reception given every reception it overlaps at the same face.
bool survives(const Reception& target, std::span<const Reception> interferers, CollisionPolicy policy);

inline bool windows_overlap(const Reception& a, const Reception& b) {
  return a.t_start_ns < b.t_end_ns && b.t_start_ns < a.t_end_ns;
}

}  // namespace pogosim
