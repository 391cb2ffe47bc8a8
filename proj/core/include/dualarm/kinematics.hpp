#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "dualarm/geometry.hpp"

namespace dualarm {

inline constexpr std::size_t kJointCount = 5;

/// One row of a standard D-H table:
///   A = Rot_z(theta + theta_offset) * Trans_z(d) * Trans_x(a) * Rot_x(alpha)
struct DHRow {
  double a = 0.0;             // link length (m)
  double alpha = 0.0;         // link twist (rad)
  double d = 0.0;             // link offset (m)
  double theta_offset = 0.0;  // joint-angle offset (rad)
};

struct JointLimit {
  double min = -kPi;
  double max = kPi;
};

/// Five joint angles in radians.
struct JointVector {
  std::array<double, kJointCount> theta{};

  double& operator[](std::size_t i) { return theta[i]; }
  double operator[](std::size_t i) const { return theta[i]; }

  friend bool operator==(const JointVector&, const JointVector&) = default;
};

/// Largest absolute per-joint difference, compared on the circle.
double joint_distance(const JointVector& a, const JointVector& b);

/// One 5-DOF arm. The closed-form inverse kinematics assumes the topology
///   row1 (0, +pi/2, d), row2 (a2, 0, 0), row3 (a3, 0, 0),
///   row4 (0, -pi/2, 0), row5 (0, 0, 0)
/// with the tool frame at Trans_z(tool_offset) past joint 5. `validate()`
/// enforces it; link lengths, base height, offsets, limits and mount are free.
struct ArmModel {
  std::string name;
  std::array<DHRow, kJointCount> rows{};
  double tool_offset = 0.0;  // d_E
  std::array<JointLimit, kJointCount> joint_limits{};
  HomogeneousTransform mount;  // robot base frame -> arm base frame
  JointVector home{};

  double base_height() const { return rows[0].d; }
  double upper_arm() const { return rows[1].a; }
  double forearm() const { return rows[2].a; }
  double reach() const { return upper_arm() + forearm() + tool_offset; }

  /// Every violated invariant, as "field: reason". Empty when valid.
  std::vector<std::string> violations() const;
  /// Throws ValidationError listing all violations.
  void validate() const;

  /// Shipped reference arm: a2 = a3 = 0.35 m, d = 0.10 m, d_E = 0.08 m,
  /// mounted at y = +0.11 m (left) or -0.11 m (right).
  static ArmModel reference(bool left);
};

HomogeneousTransform link_transform(const DHRow& row, double theta);

/// mount * A1 * ... * A5 * Trans_z(tool_offset). Out-of-limit q still
/// evaluates.
HomogeneousTransform forward_kinematics(const ArmModel& arm, const JointVector& q);

/// Robot-frame origins of the mount, each link frame and the gripper tip.
std::array<Vec3, kJointCount + 2> link_points(const ArmModel& arm, const JointVector& q);

bool within_limits(const ArmModel& arm, const JointVector& q);

enum class ElbowBranch { kUp, kDown };

const char* to_string(ElbowBranch branch);

struct IKSolution {
  JointVector q;
  ElbowBranch branch = ElbowBranch::kUp;
  double position_residual = 0.0;     // m
  double orientation_residual = 0.0;  // rad
  bool valid = false;                 // inside joint limits
};

struct IKSolutionSet {
  std::vector<IKSolution> solutions;

  bool empty() const { return solutions.empty(); }
  bool any_valid() const;
};

inline constexpr double kIkPositionTolerance = 1e-6;
inline constexpr double kIkOrientationTolerance = 1e-6;

/// Closed-form inverse kinematics for a robot-frame target pose. Returns the
/// elbow-up and elbow-down branches (they coincide on the workspace
/// boundary); out-of-limit solutions are kept with `valid == false`.
///
/// Throws Error(kUnreachable) when the elbow cosine leaves [-1, 1] or the
/// orientation cannot be produced by a 5-DOF wrist, and Error(kSingular)
/// when the target lies on the shoulder axis (p_x = p_y = 0).
IKSolutionSet inverse_kinematics(const ArmModel& arm, const HomogeneousTransform& target);

}  // namespace dualarm
