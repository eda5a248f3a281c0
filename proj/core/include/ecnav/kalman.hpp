#pragma once

#include <Eigen/Dense>

#include "ecnav/geometry.hpp"

namespace ecnav {

struct KalmanNoise {
  double process = 0.1;               // white-acceleration spectral density, (m/s^2)^2
  double measurement = 1e-4;          // position variance, m^2
  double initial_velocity_var = 4.0;  // velocity variance after the first fix, (m/s)^2
};

/// Constant-velocity track, state [px, py, vx, vy].
struct VelocityEstimate {
  Eigen::Vector4d state = Eigen::Vector4d::Zero();
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Identity();
  bool initialized = false;
  int fixes = 0;  // measurements absorbed so far


  Vec2 position() const { return {state(0), state(1)}; }
  Vec2 velocity() const { return {state(2), state(3)}; }
};

/// One predict-update cycle with a position-only measurement. An
/// uninitialized prior is seeded from the measurement with zero velocity;
/// the second fix replaces that guess by two-point differencing, after
/// which ordinary predict-update cycles run.
VelocityEstimate kalman_estimate(const VelocityEstimate& prior, Vec2 observed_position, double dt,
                                 const KalmanNoise& noise = {});

}  // namespace ecnav
