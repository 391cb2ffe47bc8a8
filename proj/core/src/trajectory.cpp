#include "dualarm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dualarm/error.hpp"

namespace dualarm {
namespace {

// A trailing sample closer than this fraction of dt to the endpoint is
// dropped so the last interval never becomes vanishingly short.
constexpr double kEndpointMergeFraction = 0.05;

}  // namespace

MotionLimits MotionLimits::defaults() {
  MotionLimits m;
  m.vel_max = {1.73, 1.73, 1.73, 2.56, 2.56};
  m.acc_max.fill(0.1);
  return m;
}

std::vector<std::string> MotionLimits::violations() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (!(vel_max[i] > 0.0) || !std::isfinite(vel_max[i]))
      out.push_back("vel_max[" + std::to_string(i) + "]: must be > 0");
    if (!(acc_max[i] > 0.0) || !std::isfinite(acc_max[i]))
      out.push_back("acc_max[" + std::to_string(i) + "]: must be > 0");
  }
  return out;
}

double minimum_motion_time(double distance, double vel_max, double acc_max) {
  distance = std::abs(distance);
  if (distance == 0.0) return 0.0;
  if (distance <= vel_max * vel_max / acc_max) return 2.0 * std::sqrt(distance / acc_max);
  return distance / vel_max + vel_max / acc_max;
}

JointProfile::JointProfile(double distance, double vel_max, double acc_max, double duration)
    : distance_(distance), accel_(acc_max) {
  if (distance_ <= 0.0 || duration <= 0.0) {
    distance_ = 0.0;
    return;
  }
  if (distance_ <= vel_max * vel_max / acc_max) {
    ramp_ = std::sqrt(distance_ / acc_max);
    peak_ = acc_max * ramp_;
    native_ = 2.0 * ramp_;
  } else {
    ramp_ = vel_max / acc_max;
    peak_ = vel_max;
    native_ = distance_ / vel_max + ramp_;
  }
  scale_ = std::min(1.0, native_ / duration);
}

double JointProfile::position(double t) const {
  if (distance_ == 0.0 || t <= 0.0) return 0.0;
  const double tau = t * scale_;
  if (tau >= native_) return distance_;
  if (tau <= ramp_) return 0.5 * accel_ * tau * tau;
  if (tau <= native_ - ramp_) return 0.5 * accel_ * ramp_ * ramp_ + peak_ * (tau - ramp_);
  const double rem = native_ - tau;
  return distance_ - 0.5 * accel_ * rem * rem;
}

double JointProfile::velocity(double t) const {
  if (distance_ == 0.0 || t <= 0.0) return 0.0;
  const double tau = t * scale_;
  if (tau >= native_) return 0.0;
  double v;
  if (tau <= ramp_) v = accel_ * tau;
  else if (tau <= native_ - ramp_) v = peak_;
  else v = accel_ * (native_ - tau);
  return scale_ * v;
}

double JointProfile::acceleration(double t) const {
  if (distance_ == 0.0 || t < 0.0) return 0.0;
  const double tau = t * scale_;
  if (tau >= native_) return 0.0;
  double a;
  if (tau < ramp_) a = accel_;
  else if (tau <= native_ - ramp_) a = 0.0;
  else a = -accel_;
  return scale_ * scale_ * a;
}

Trajectory::Trajectory(const JointVector& start, const JointVector& goal,
                       std::array<JointProfile, kJointCount> profiles, double duration, double dt)
    : start_(start), goal_(goal), profiles_(profiles), duration_(duration) {
  for (std::size_t i = 0; i < kJointCount; ++i) direction_[i] = goal[i] >= start[i] ? 1.0 : -1.0;

  if (duration_ <= 0.0) {
    points_.push_back({0.0, start_, JointVector{}});
    return;
  }
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t >= duration_ - kEndpointMergeFraction * dt) break;
    points_.push_back({t, position_at(t), velocity_at(t)});
  }
  points_.push_back({duration_, goal_, JointVector{}});
}

JointVector Trajectory::position_at(double t) const {
  if (t <= 0.0) return start_;
  if (t >= duration_) return goal_;
  JointVector q;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    q[i] = start_[i] + direction_[i] * profiles_[i].position(t);
  }
  return q;
}

JointVector Trajectory::velocity_at(double t) const {
  JointVector v;
  if (t <= 0.0 || t >= duration_) return v;
  for (std::size_t i = 0; i < kJointCount; ++i) v[i] = direction_[i] * profiles_[i].velocity(t);
  return v;
}

Trajectory plan_joint_trajectory(const JointVector& start, const JointVector& goal,
                                 const MotionLimits& limits, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kInvalidArgument, "trajectory dt must be > 0");
  }
  if (const auto v = limits.violations(); !v.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid motion limits: " + v.front());
  }
  double duration = 0.0;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    duration = std::max(duration, minimum_motion_time(goal[i] - start[i], limits.vel_max[i], limits.acc_max[i]));
  }
  std::array<JointProfile, kJointCount> profiles;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    profiles[i] = JointProfile(std::abs(goal[i] - start[i]), limits.vel_max[i], limits.acc_max[i], duration);
  }
  return Trajectory(start, goal, profiles, duration, dt);
}

}  // namespace dualarm
