#include "dualarm/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dualarm/error.hpp"

namespace dualarm {
namespace {

constexpr double kTopologyTol = 1e-12;
constexpr double kSingularRadius = 1e-12;
// Slack on the elbow cosine before a target is declared out of reach; covers
// rounding for poses that sit exactly on the workspace boundary.
constexpr double kElbowCosineSlack = 1e-9;

bool near(double value, double expected) { return std::abs(value - expected) <= kTopologyTol; }

std::string joint_field(const char* prefix, std::size_t i, const char* suffix) {
  std::ostringstream os;
  os << prefix << (i + 1) << suffix;
  return os.str();
}

}  // namespace

double joint_distance(const JointVector& a, const JointVector& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    worst = std::max(worst, std::abs(wrap_angle(a[i] - b[i])));
  }
  return worst;
}

std::vector<std::string> ArmModel::violations() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const DHRow& r = rows[i];
    if (!(r.a >= 0.0)) out.push_back(joint_field("dh.", i, ".a: must be >= 0"));
    if (!(r.alpha > -kPi && r.alpha <= kPi))
      out.push_back(joint_field("dh.", i, ".alpha: must lie in (-pi, pi]"));
    if (!(r.theta_offset > -kPi && r.theta_offset <= kPi))
      out.push_back(joint_field("dh.", i, ".theta_offset: must lie in (-pi, pi]"));
    const JointLimit& lim = joint_limits[i];
    if (!(lim.min < lim.max)) out.push_back(joint_field("limit.", i, ": min must be < max"));
    if (lim.min <= lim.max && !(home[i] >= lim.min && home[i] <= lim.max))
      out.push_back(joint_field("home.", i, ": outside joint limit"));
  }

  const DHRow& r1 = rows[0];
  if (!near(r1.a, 0.0) || !near(r1.alpha, kPi / 2))
    out.push_back("dh.1: closed-form IK requires a = 0, alpha = pi/2");
  if (!(r1.d >= 0.0)) out.push_back("dh.1.d: must be >= 0");
  for (std::size_t i : {1u, 2u}) {
    if (!(rows[i].a > 0.0)) out.push_back(joint_field("dh.", i, ".a: link length must be > 0"));
    if (!near(rows[i].alpha, 0.0) || !near(rows[i].d, 0.0))
      out.push_back(joint_field("dh.", i, ": closed-form IK requires alpha = 0, d = 0"));
  }
  if (!near(rows[3].a, 0.0) || !near(rows[3].alpha, -kPi / 2) || !near(rows[3].d, 0.0))
    out.push_back("dh.4: closed-form IK requires a = 0, alpha = -pi/2, d = 0");
  if (!near(rows[4].a, 0.0) || !near(rows[4].alpha, 0.0) || !near(rows[4].d, 0.0))
    out.push_back("dh.5: closed-form IK requires a = 0, alpha = 0, d = 0");

  if (!(tool_offset >= 0.0)) out.push_back("tool_offset: must be >= 0");
  if (!(reach() > 0.0)) out.push_back("reach: a2 + a3 + tool_offset must be > 0");
  if (!is_rotation(mount.rotation)) out.push_back("mount.rotation: not a proper rotation");
  if (!mount.translation.allFinite()) out.push_back("mount.translation: not finite");
  return out;
}

void ArmModel::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::ostringstream os;
  os << "arm '" << name << "' is invalid:";
  for (const auto& s : v) os << "\n  " << s;
  throw Error(ErrorCode::kValidationError, os.str());
}

ArmModel ArmModel::reference(bool left) {
  ArmModel arm;
  arm.name = left ? "left" : "right";
  arm.rows = {{
      {0.0, kPi / 2, 0.10, 0.0},
      {0.35, 0.0, 0.0, 0.0},
      {0.35, 0.0, 0.0, 0.0},
      {0.0, -kPi / 2, 0.0, 0.0},
      {0.0, 0.0, 0.0, 0.0},
  }};
  arm.tool_offset = 0.08;
  arm.joint_limits = {{
      {-kPi, kPi},
      {-kPi / 2, kPi},
      {-2.8, 2.8},
      {-kPi, kPi},
      {-kPi, kPi},
  }};
  arm.mount.translation = Vec3(0.0, left ? 0.11 : -0.11, 0.0);
  arm.home = {{0.0, kPi / 2, -kPi / 2, 0.0, 0.0}};
  return arm;
}

HomogeneousTransform link_transform(const DHRow& row, double theta) {
  const double ct = std::cos(theta + row.theta_offset);
  const double st = std::sin(theta + row.theta_offset);
  const double ca = std::cos(row.alpha);
  const double sa = std::sin(row.alpha);
  HomogeneousTransform t;
  t.rotation << ct, -st * ca, st * sa,
                st, ct * ca, -ct * sa,
                0.0, sa, ca;
  t.translation = Vec3(row.a * ct, row.a * st, row.d);
  return t;
}

HomogeneousTransform forward_kinematics(const ArmModel& arm, const JointVector& q) {
  HomogeneousTransform t = arm.mount;
  for (std::size_t i = 0; i < kJointCount; ++i) t = t * link_transform(arm.rows[i], q[i]);
  return t * HomogeneousTransform::trans_z(arm.tool_offset);
}

std::array<Vec3, kJointCount + 2> link_points(const ArmModel& arm, const JointVector& q) {
  std::array<Vec3, kJointCount + 2> pts;
  HomogeneousTransform t = arm.mount;
  pts[0] = t.translation;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    t = t * link_transform(arm.rows[i], q[i]);
    pts[i + 1] = t.translation;
  }
  pts[kJointCount + 1] = (t * HomogeneousTransform::trans_z(arm.tool_offset)).translation;
  return pts;
}

bool within_limits(const ArmModel& arm, const JointVector& q) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (q[i] < arm.joint_limits[i].min || q[i] > arm.joint_limits[i].max) return false;
  }
  return true;
}

const char* to_string(ElbowBranch branch) {
  return branch == ElbowBranch::kUp ? "elbow-up" : "elbow-down";
}

bool IKSolutionSet::any_valid() const {
  return std::any_of(solutions.begin(), solutions.end(), [](const IKSolution& s) { return s.valid; });
}

IKSolutionSet inverse_kinematics(const ArmModel& arm, const HomogeneousTransform& target) {
  if (!is_rotation(target.rotation, 1e-6)) {
    throw Error(ErrorCode::kInvalidArgument, "IK target rotation is not orthonormal");
  }
  const HomogeneousTransform local = arm.mount.inverse() * target;
  const Vec3& p = local.translation;
  const Vec3 i = local.rotation.col(0);
  const Vec3 j = local.rotation.col(1);
  const Vec3 k = local.rotation.col(2);

  const double d = arm.base_height();
  const double a2 = arm.upper_arm();
  const double a3 = arm.forearm();
  const double de = arm.tool_offset;

  if (std::hypot(p.x(), p.y()) < kSingularRadius) {
    throw Error(ErrorCode::kSingular, "target lies on the shoulder axis (p_x = p_y = 0)");
  }
  const double t1 = std::atan2(p.y(), p.x());
  const double c1 = std::cos(t1);
  const double s1 = std::sin(t1);

  // Approach vector k = (-c1 s234, -s1 s234, c234).
  const double s234 = -(k.x() * c1 + k.y() * s1);
  const double c234 = k.z();
  const double t234 = std::atan2(s234, c234);

  const double m = p.x() * c1 + p.y() * s1 + de * std::sin(t234);
  const double n = p.z() - d - de * std::cos(t234);

  double c3 = (m * m + n * n - a2 * a2 - a3 * a3) / (2.0 * a2 * a3);
  if (std::abs(c3) > 1.0 + kElbowCosineSlack) {
    std::ostringstream os;
    os << "target outside workspace (elbow cosine " << c3 << ")";
    throw Error(ErrorCode::kUnreachable, os.str());
  }
  c3 = std::clamp(c3, -1.0, 1.0);
  const double t5 = std::atan2(i.y() * c1 - i.x() * s1, j.y() * c1 - j.x() * s1);

  IKSolutionSet out;
  for (ElbowBranch branch : {ElbowBranch::kUp, ElbowBranch::kDown}) {
    const double t3 = (branch == ElbowBranch::kUp ? -1.0 : 1.0) * std::acos(c3);
    const double s3 = std::sin(t3);
    const double t2 = std::atan2(n * (a2 + a3 * c3) - m * a3 * s3, n * a3 * s3 + m * (a2 + a3 * c3));
    const double t4 = t234 - t2 - t3;

    IKSolution sol;
    sol.branch = branch;
    const std::array<double, kJointCount> kinematic{t1, t2, t3, t4, t5};
    for (std::size_t idx = 0; idx < kJointCount; ++idx) {
      sol.q[idx] = wrap_angle(kinematic[idx] - arm.rows[idx].theta_offset);
    }
    const HomogeneousTransform reached = forward_kinematics(arm, sol.q);
    sol.position_residual = (reached.translation - target.translation).norm();
    sol.orientation_residual = rotation_distance(reached.rotation, target.rotation);
    if (sol.position_residual > kIkPositionTolerance ||
        sol.orientation_residual > kIkOrientationTolerance) {
      continue;
    }
    sol.valid = within_limits(arm, sol.q);
    out.solutions.push_back(sol);
  }

  if (out.empty()) {
    throw Error(ErrorCode::kUnreachable,
                "target orientation is not reachable by the 5-DOF wrist");
  }
  return out;
}

}  // namespace dualarm
