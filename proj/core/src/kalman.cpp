#include "ecnav/kalman.hpp"

#include "ecnav/error.hpp"

namespace ecnav {

VelocityEstimate kalman_estimate(const VelocityEstimate& prior, Vec2 z, double dt, const KalmanNoise& noise) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidParams, "kalman_estimate requires dt > 0");
  VelocityEstimate out;
  out.initialized = true;
  out.fixes = prior.initialized ? prior.fixes + 1 : 1;
  if (!prior.initialized) {
    out.state << z.x, z.y, 0.0, 0.0;
    out.covariance = Eigen::Vector4d(noise.measurement, noise.measurement, noise.initial_velocity_var,
                                     noise.initial_velocity_var)
                         .asDiagonal();
    return out;
  }
  if (prior.fixes == 1) {
    // Two-point differencing: the zero-velocity seed carries no information
    // worth blending, and blending it makes the error ring for a while.
    const double r = noise.measurement;
    out.state << z.x, z.y, (z.x - prior.state(0)) / dt, (z.y - prior.state(1)) / dt;
    out.covariance.setZero();
    for (int axis = 0; axis < 2; ++axis) {
      out.covariance(axis, axis) = r;
      out.covariance(axis, axis + 2) = r / dt;
      out.covariance(axis + 2, axis) = r / dt;
      out.covariance(axis + 2, axis + 2) = 2.0 * r / (dt * dt);
    }
    return out;
  }

  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  const double q = noise.process;
  Eigen::Matrix4d qm = Eigen::Matrix4d::Zero();
  for (int axis = 0; axis < 2; ++axis) {
    qm(axis, axis) = q * dt * dt * dt / 3.0;
    qm(axis, axis + 2) = q * dt * dt / 2.0;
    qm(axis + 2, axis) = q * dt * dt / 2.0;
    qm(axis + 2, axis + 2) = q * dt;
  }
  const Eigen::Vector4d x_pred = f * prior.state;
  const Eigen::Matrix4d p_pred = f * prior.covariance * f.transpose() + qm;

  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Eigen::Matrix2d r = Eigen::Matrix2d::Identity() * noise.measurement;
  const Eigen::Matrix2d s = h * p_pred * h.transpose() + r;
  const Eigen::Matrix<double, 4, 2> k = p_pred * h.transpose() * s.inverse();
  const Eigen::Vector2d innovation(z.x - x_pred(0), z.y - x_pred(1));

  out.state = x_pred + k * innovation;
  // Joseph form keeps the covariance symmetric positive semi-definite.
  const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - k * h;
  out.covariance = ikh * p_pred * ikh.transpose() + k * r * k.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

}  // namespace ecnav
