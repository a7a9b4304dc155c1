#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "pogosim/geometry.hpp"
#include "pogosim/rng.hpp"

namespace pogosim {

enum class LightKind : std::uint8_t { point, ambient };

struct LightSource {
  Vec2 position;
  double power = 1.0;
  LightKind kind = LightKind::point;
};

/// Softening term of the inverse-square falloff, m^2.
inline constexpr double kLightSoftening = 1e-4;

enum class PhotoSensor : std::uint8_t { front_right = 0, front_left = 1, back = 2 };
inline constexpr std::size_t kPhotoSensorCount = 3;
using PhotoReadings = std::array<std::uint16_t, kPhotoSensorCount>;

struct PhotoSensorLayout {
  std::array<double, kPhotoSensorCount> azimuth_deg = {-45.0, 45.0, 180.0};
  double mount_radius = 0.025;
};

struct SensingParams {
  double noise_light = 0.02;  // relative std
  double i_sat = 4.0;
  double noise_accel = 0.05;  // m/s^2
  double noise_gyro = 0.01;   // rad/s
  bool cosine_weighting = false;
  PhotoSensorLayout layout;

  void validate() const;
};

/// Sum of ambient powers plus point powers / (eps + d^2).
double light_intensity_at(Vec2 point, std::span<const LightSource> sources);

/// Point-source intensity weighted by the cosine of the incidence angle on a
/// sensor facing `normal_angle`. Ambient terms are not weighted.
double light_intensity_facing(Vec2 point, double normal_angle, std::span<const LightSource> sources);

/// 16-bit quantization: floor(65535 * I / I_sat), clamped.
std::uint16_t quantize_light(double intensity, double i_sat);

Vec2 photosensor_position(const Pose2D& pose, const PhotoSensorLayout& layout, PhotoSensor sensor);

PhotoReadings read_photosensors(const Pose2D& pose, const SensingParams& params, std::span<const LightSource> sources,
                                RngStream& rng);

struct ImuSample {
  Vec2 accel_body;
  double gyro_z = 0.0;
  std::uint64_t timestamp = 0;  // ticks

  bool operator==(const ImuSample&) const = default;
};

/// Poses at ticks t, t-1, t-2 (newest first). Fewer than two poses yields a zero sample.
ImuSample read_imu(std::span<const Pose2D> newest_first, double dt, std::uint64_t tick, const SensingParams& params,
                   RngStream& rng);

}  // namespace pogosim
