#include "pogosim/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pogosim {

void SensingParams::validate() const {
  if (noise_light < 0.0 || noise_accel < 0.0 || noise_gyro < 0.0) throw std::invalid_argument("noise must be >= 0");
  if (!(i_sat > 0.0)) throw std::invalid_argument("i_sat must be > 0");
  if (layout.mount_radius < 0.0) throw std::invalid_argument("mount_radius must be >= 0");
}

double light_intensity_at(Vec2 point, std::span<const LightSource> sources) {
  double total = 0.0;
  for (const LightSource& s : sources) {
    if (s.kind == LightKind::ambient) {
      total += s.power;
    } else {
      total += s.power / (kLightSoftening + norm_sq(point - s.position));
    }
  }
  return total;
}

double light_intensity_facing(Vec2 point, double normal_angle, std::span<const LightSource> sources) {
  double total = 0.0;
  const Vec2 n = unit_from_angle(normal_angle);
  for (const LightSource& s : sources) {
    if (s.kind == LightKind::ambient) {
      total += s.power;
      continue;
    }
    const Vec2 d = s.position - point;
    const double dist = norm(d);
    const double cosine = dist > 0.0 ? std::max(0.0, dot(d, n) / dist) : 1.0;
    total += cosine * s.power / (kLightSoftening + dist * dist);
  }
  return total;
}

std::uint16_t quantize_light(double intensity, double i_sat) {
  const double clamped = std::clamp(intensity, 0.0, i_sat);
  return static_cast<std::uint16_t>(std::floor(65535.0 * clamped / i_sat));
}

Vec2 photosensor_position(const Pose2D& pose, const PhotoSensorLayout& layout, PhotoSensor sensor) {
  const double az = deg_to_rad(layout.azimuth_deg[static_cast<std::size_t>(sensor)]);
  return pose.position() + unit_from_angle(pose.theta + az) * layout.mount_radius;
}

PhotoReadings read_photosensors(const Pose2D& pose, const SensingParams& params, std::span<const LightSource> sources,
                                RngStream& rng) {
  PhotoReadings out{};
  for (std::size_t i = 0; i < kPhotoSensorCount; ++i) {
    const auto sensor = static_cast<PhotoSensor>(i);
    const Vec2 p = photosensor_position(pose, params.layout, sensor);
    const double base = params.cosine_weighting
                            ? light_intensity_facing(p, pose.theta + deg_to_rad(params.layout.azimuth_deg[i]), sources)
                            : light_intensity_at(p, sources);
    const double noisy = base * (1.0 + rng.gaussian(params.noise_light));
    out[i] = quantize_light(noisy, params.i_sat);
  }
  return out;
}

ImuSample read_imu(std::span<const Pose2D> newest_first, double dt, std::uint64_t tick, const SensingParams& params,
                   RngStream& rng) {
  ImuSample s;
  s.timestamp = tick;
  if (newest_first.size() < 2) return s;
  const Pose2D& p0 = newest_first[0];
  const Pose2D& p1 = newest_first[1];
  s.gyro_z = wrap_angle(p0.theta - p1.theta) / dt;
  if (newest_first.size() >= 3) {
    const Pose2D& p2 = newest_first[2];
    const Vec2 acc_world{(p0.x - 2.0 * p1.x + p2.x) / (dt * dt), (p0.y - 2.0 * p1.y + p2.y) / (dt * dt)};
    s.accel_body = to_body_frame(p0, acc_world);
  }
  s.accel_body.x += rng.gaussian(params.noise_accel);
  s.accel_body.y += rng.gaussian(params.noise_accel);
  s.gyro_z += rng.gaussian(params.noise_gyro);
  return s;
}

}  // namespace pogosim
