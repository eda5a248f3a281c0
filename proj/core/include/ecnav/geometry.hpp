#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace ecnav {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
  }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double bearing_of(Vec2 v) { return std::atan2(v.y, v.x); }

/// Rotates v counter-clockwise by angle.
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Pose2D() = default;
  Pose2D(double px, double py, double psi) : x(px), y(py), heading(normalize_angle(psi)) {}
  Pose2D(Vec2 p, double psi) : Pose2D(p.x, p.y, psi) {}

  Vec2 position() const { return {x, y}; }
  bool operator==(const Pose2D&) const = default;
};

/// Full agent state: observable [position, velocity, radius] and hidden
/// [local goal, preferred speed, heading].
struct AgentState {
  Vec2 position;
  Vec2 velocity;
  double radius = 0.2;
  Vec2 local_goal;
  double v_pref = 1.0;
  double heading = 0.0;

  static constexpr int kObservableSize = 5;
  static constexpr int kHiddenSize = 4;

  Pose2D pose() const { return {position, heading}; }
  bool operator==(const AgentState&) const = default;
};

/// Velocity command u = [speed, heading].
struct Command {
  double speed = 0.0;
  double heading = 0.0;
};

struct LaserScan {
  Pose2D frame;
  double r_max = 5.0;
  std::vector<double> ranges;

  int size() const { return static_cast<int>(ranges.size()); }
  double bearing(int i) const { return frame.heading + kTwoPi * i / static_cast<double>(ranges.size()); }
  /// Scan endpoint for bearing i in world coordinates.
  Vec2 endpoint(int i) const { return frame.position() + unit_vector(bearing(i)) * ranges[static_cast<std::size_t>(i)]; }
};

}  // namespace ecnav
