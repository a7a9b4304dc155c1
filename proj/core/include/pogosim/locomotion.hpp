#pragma once

#include <numbers>
#include <string_view>

#include "pogosim/geometry.hpp"
#include "pogosim/rng.hpp"

namespace pogosim {

/// Actuator duties. `aux` drives the spare third motor and has no kinematic effect.
struct MotorCommand {
  double left = 0.0;
  double right = 0.0;
  double aux = 0.0;

  bool operator==(const MotorCommand&) const = default;
};

enum class LocomotionModel : std::uint8_t { differential, vibration };

std::string_view to_string(LocomotionModel m);
LocomotionModel locomotion_model_from_string(std::string_view s);

struct MotionModelParams {
  LocomotionModel model = LocomotionModel::vibration;
  double v_max = 0.06;                  // m/s
  double omega_max = std::numbers::pi;  // rad/s, vibration turn gain
  double wheel_base = 0.05;             // m
  double noise_v = 0.1;                 // relative std on forward speed
  double noise_omega = 0.2;             // rad/s std
  double bias_std = 0.1;                // rad/s std of the per-robot drift drawn at init
  double bias_omega = 0.0;              // rad/s, the drawn drift

  void validate() const;
};

/// Clamps duties into the range accepted by `model`.
MotorCommand clamp_command(const MotorCommand& cmd, LocomotionModel model);

/// Noise sample held constant over one controller period.
struct VibrationNoise {
  double eta_v = 0.0;
  double eta_omega = 0.0;
};

VibrationNoise draw_vibration_noise(const MotionModelParams& params, RngStream& rng);

/// Integrates a unicycle with constant (v, omega) over dt along the exact arc.
Pose2D integrate_unicycle(const Pose2D& pose, double v, double omega, double dt);

/// Wheeled differential drive. Noise-free.
Pose2D diff_drive_step(const Pose2D& pose, const MotorCommand& cmd, const MotionModelParams& params, double dt);

/// Vibration stick-slip: noisy unicycle. Motors off is an exact fixed point.
Pose2D vibration_step(const Pose2D& pose, const MotorCommand& cmd, const MotionModelParams& params,
                      const VibrationNoise& noise, double dt);

/// Dispatches on params.model.
Pose2D locomotion_step(const Pose2D& pose, const MotorCommand& cmd, const MotionModelParams& params,
                       const VibrationNoise& noise, double dt);

/// Nominal (noise-free) body-frame forward speed and turn rate for a command.
struct Twist {
  double v = 0.0;
  double omega = 0.0;
};
Twist nominal_twist(const MotorCommand& cmd, const MotionModelParams& params);

}  // namespace pogosim
