#pragma once

#include <array>
#include <vector>

#include "dualarm/kinematics.hpp"

namespace dualarm {

struct MotionLimits {
  std::array<double, kJointCount> vel_max{};  // rad/s
  std::array<double, kJointCount> acc_max{};  // rad/s^2

  /// 1.73 rad/s on the three proximal joints, 2.56 rad/s on the two distal
  /// joints, 0.1 rad/s^2 everywhere.
  static MotionLimits defaults();

  std::vector<std::string> violations() const;
};

inline constexpr double kDefaultTrajectoryDt = 0.01;

/// Minimum time to move `distance` from rest to rest under a trapezoidal
/// (or, for short moves, triangular) velocity profile.
double minimum_motion_time(double distance, double vel_max, double acc_max);

/// Rest-to-rest trapezoidal profile for one joint, scaled to a shared
/// duration. Position is measured from the start along `direction`.
class JointProfile {
 public:
  JointProfile() = default;
  JointProfile(double distance, double vel_max, double acc_max, double duration);

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
  double distance() const { return distance_; }

 private:
  double distance_ = 0.0;
  double ramp_ = 0.0;       // accel phase length in native time
  double peak_ = 0.0;       // native peak speed
  double accel_ = 0.0;
  double native_ = 0.0;     // native (unscaled) duration
  double scale_ = 1.0;      // native time per shared time
};

struct TrajectoryPoint {
  double t = 0.0;
  JointVector q;
  JointVector qdot;
};

/// Synchronized joint-space trajectory. `points` are the dt samples plus the
/// exact endpoint; `position_at` evaluates the underlying profile exactly.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(const JointVector& start, const JointVector& goal,
             std::array<JointProfile, kJointCount> profiles, double duration, double dt);

  const std::vector<TrajectoryPoint>& points() const { return points_; }
  double duration() const { return duration_; }
  const JointVector& start() const { return start_; }
  const JointVector& goal() const { return goal_; }

  JointVector position_at(double t) const;
  JointVector velocity_at(double t) const;

 private:
  JointVector start_;
  JointVector goal_;
  std::array<JointProfile, kJointCount> profiles_{};
  std::array<double, kJointCount> direction_{};
  double duration_ = 0.0;
  std::vector<TrajectoryPoint> points_;
};

/// The joint with the longest minimum time sets the duration; the other
/// joints run their own minimum-time profile slowed to that duration.
/// Throws InvalidArgument for dt <= 0 or invalid limits.
Trajectory plan_joint_trajectory(const JointVector& start, const JointVector& goal,
                                 const MotionLimits& limits, double dt = kDefaultTrajectoryDt);

}  // namespace dualarm
