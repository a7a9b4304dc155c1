#include "pogosim/locomotion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pogosim {

std::string_view to_string(LocomotionModel m) {
  return m == LocomotionModel::differential ? "differential" : "vibration";
}

LocomotionModel locomotion_model_from_string(std::string_view s) {
  if (s == "differential") return LocomotionModel::differential;
  if (s == "vibration") return LocomotionModel::vibration;
  throw std::invalid_argument("unknown locomotion model '" + std::string(s) + "'");
}

void MotionModelParams::validate() const {
  if (!(v_max > 0.0)) throw std::invalid_argument("v_max must be > 0");
  if (!(omega_max > 0.0)) throw std::invalid_argument("omega_max must be > 0");
  if (!(wheel_base > 0.0)) throw std::invalid_argument("wheel_base must be > 0");
  if (noise_v < 0.0 || noise_omega < 0.0 || bias_std < 0.0) throw std::invalid_argument("noise terms must be >= 0");
}

MotorCommand clamp_command(const MotorCommand& cmd, LocomotionModel model) {
  const double lo = model == LocomotionModel::vibration ? 0.0 : -1.0;
  auto finite_or_zero = [](double v) { return std::isfinite(v) ? v : 0.0; };
  return {std::clamp(finite_or_zero(cmd.left), lo, 1.0), std::clamp(finite_or_zero(cmd.right), lo, 1.0),
          std::clamp(finite_or_zero(cmd.aux), 0.0, 1.0)};
}

VibrationNoise draw_vibration_noise(const MotionModelParams& params, RngStream& rng) {
  VibrationNoise n;
  n.eta_v = rng.gaussian(params.noise_v);
  n.eta_omega = rng.gaussian(params.noise_omega);
  return n;
}

Pose2D integrate_unicycle(const Pose2D& pose, double v, double omega, double dt) {
  if (v == 0.0 && omega == 0.0) return pose;
  const double dtheta = omega * dt;
  Pose2D out = pose;
  if (std::abs(dtheta) < 1e-12) {
    out.x += v * dt * std::cos(pose.theta);
    out.y += v * dt * std::sin(pose.theta);
  } else {
    const double r = v / omega;
    const double th1 = pose.theta + dtheta;
    out.x += r * (std::sin(th1) - std::sin(pose.theta));
    out.y -= r * (std::cos(th1) - std::cos(pose.theta));
  }
  out.theta = wrap_angle(pose.theta + dtheta);
  return out;
}

Twist nominal_twist(const MotorCommand& raw, const MotionModelParams& params) {
  const MotorCommand cmd = clamp_command(raw, params.model);
  if (params.model == LocomotionModel::differential) {
    return {params.v_max * (cmd.left + cmd.right) / 2.0, params.v_max * (cmd.right - cmd.left) / params.wheel_base};
  }
  return {params.v_max * (cmd.left + cmd.right) / 2.0, params.omega_max * (cmd.left - cmd.right)};
}

Pose2D diff_drive_step(const Pose2D& pose, const MotorCommand& raw, const MotionModelParams& params, double dt) {
  const MotorCommand cmd = clamp_command(raw, LocomotionModel::differential);
  const double v = params.v_max * (cmd.left + cmd.right) / 2.0;
  const double omega = params.v_max * (cmd.right - cmd.left) / params.wheel_base;
  return integrate_unicycle(pose, v, omega, dt);
}

Pose2D vibration_step(const Pose2D& pose, const MotorCommand& raw, const MotionModelParams& params,
                      const VibrationNoise& noise, double dt) {
  const MotorCommand cmd = clamp_command(raw, LocomotionModel::vibration);
  if (cmd.left == 0.0 && cmd.right == 0.0) return pose;
  const double v = params.v_max * (cmd.left + cmd.right) / 2.0 * (1.0 + noise.eta_v);
  const double omega = params.omega_max * (cmd.left - cmd.right) + params.bias_omega + noise.eta_omega;
  return integrate_unicycle(pose, v, omega, dt);
}

Pose2D locomotion_step(const Pose2D& pose, const MotorCommand& cmd, const MotionModelParams& params,
                       const VibrationNoise& noise, double dt) {
  if (params.model == LocomotionModel::differential) return diff_drive_step(pose, cmd, params, dt);
  return vibration_step(pose, cmd, params, noise, dt);
}

}  // namespace pogosim
