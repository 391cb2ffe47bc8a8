#include <gtest/gtest.h>

#include <random>

#include "dualarm/error.hpp"
#include "dualarm/kinematics.hpp"
#include "oracles.hpp"

using namespace dualarm;

namespace {

JointVector random_in_limits(const ArmModel& arm, std::mt19937_64& rng) {
  JointVector q;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    std::uniform_real_distribution<double> u(arm.joint_limits[i].min, arm.joint_limits[i].max);
    q[i] = u(rng);
  }
  return q;
}

std::array<double, 5> as_array(const JointVector& q) { return q.theta; }

void expect_matches_oracle(const HomogeneousTransform& t, const oracle::M4& m, double tol) {
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(t.rotation(r, c), m[r][c], tol) << r << "," << c;
    EXPECT_NEAR(t.translation[r], m[r][3], tol) << r;
  }
}

HomogeneousTransform gripper_down(const ArmModel& arm, const Vec3& p) {
  const Vec3 local = arm.mount.inverse().apply(p);
  const double yaw = std::atan2(local.y(), local.x());
  Mat3 r;
  r.col(0) = Vec3(-std::cos(yaw), -std::sin(yaw), 0);
  r.col(1) = Vec3(-std::sin(yaw), std::cos(yaw), 0);
  r.col(2) = Vec3(0, 0, -1);
  return {r, p};
}

}  // namespace

TEST(LinkTransform, IdentityRow) {
  const HomogeneousTransform t = link_transform(DHRow{}, 0.0);
  EXPECT_EQ(t.rotation, Mat3::Identity());
  EXPECT_EQ(t.translation, Vec3::Zero());
}

TEST(LinkTransform, PureXTranslation) {
  const HomogeneousTransform t = link_transform(DHRow{1.0, 0, 0, 0}, 0.0);
  EXPECT_EQ(t.rotation, Mat3::Identity());
  EXPECT_EQ(t.translation, Vec3(1, 0, 0));
}

TEST(LinkTransform, FrozenReferenceValue) {
  // Evaluated independently (factor-by-factor product); frozen here.
  const HomogeneousTransform t = link_transform(DHRow{0.35, kPi / 2, 0.1, 0.0}, kPi / 3);
  const double expected[3][4] = {{0.5, 0.0, 0.8660254037844386, 0.175},
                                 {0.8660254037844386, 0.0, -0.5, 0.30310889132455349},
                                 {0.0, 1.0, 0.0, 0.1}};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(t.rotation(r, c), expected[r][c], 1e-15);
    EXPECT_NEAR(t.translation[r], expected[r][3], 1e-15);
  }
  expect_matches_oracle(t, oracle::dh(0.35, kPi / 2, 0.1, kPi / 3), 1e-15);
}

TEST(LinkTransform, ThetaOffsetAddsToJointAngle) {
  const DHRow row{0.2, 0.3, 0.4, 0.5};
  const HomogeneousTransform a = link_transform(row, 0.25);
  expect_matches_oracle(a, oracle::dh(0.2, 0.3, 0.4, 0.75), 1e-15);
}

TEST(ForwardKinematics, ZeroChainIsIdentity) {
  ArmModel arm = ArmModel::reference(true);
  arm.rows = {};
  arm.tool_offset = 0.0;
  arm.mount = HomogeneousTransform::identity();
  const HomogeneousTransform t = forward_kinematics(arm, JointVector{});
  EXPECT_LT((t.rotation - Mat3::Identity()).norm(), 1e-15);
  EXPECT_LT(t.translation.norm(), 1e-15);
}

TEST(ForwardKinematics, ZeroPoseWithinReach) {
  for (bool left : {true, false}) {
    const ArmModel arm = ArmModel::reference(left);
    const HomogeneousTransform t = forward_kinematics(arm, JointVector{});
    const Vec3 local = t.translation - arm.mount.translation;
    EXPECT_LE(local.norm(), arm.reach() + arm.base_height());
    // Links stretched along x, tool along +z.
    EXPECT_NEAR(local.x(), 0.70, 1e-12);
    EXPECT_NEAR(local.z(), 0.18, 1e-12);
  }
}

TEST(ForwardKinematics, MatchesMatrixProductOracle) {
  std::mt19937_64 rng(11);
  for (bool left : {true, false}) {
    const ArmModel arm = ArmModel::reference(left);
    oracle::ArmParams p;
    p.mount_y = arm.mount.translation.y();
    for (int n = 0; n < 300; ++n) {
      const JointVector q = random_in_limits(arm, rng);
      expect_matches_oracle(forward_kinematics(arm, q), oracle::fk(p, as_array(q)), 1e-12);
    }
  }
}

TEST(ForwardKinematics, ClosedFormEntries) {
  const ArmModel arm = ArmModel::reference(true);
  const HomogeneousTransform mount_inv = arm.mount.inverse();
  std::mt19937_64 rng(5);
  double ix_printed_gap = 0.0, jy_printed_gap = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const JointVector q = random_in_limits(arm, rng);
    const HomogeneousTransform t = mount_inv * forward_kinematics(arm, q);
    const oracle::ClosedForm f = oracle::closed_form(oracle::ArmParams{}, as_array(q));
    const Mat3& r = t.rotation;
    EXPECT_NEAR(r(1, 0), f.iy, 1e-9);
    EXPECT_NEAR(r(2, 0), f.iz, 1e-9);
    EXPECT_NEAR(r(0, 1), f.jx, 1e-9);
    EXPECT_NEAR(r(2, 1), f.jz, 1e-9);
    EXPECT_NEAR(r(0, 2), f.kx, 1e-9);
    EXPECT_NEAR(r(1, 2), f.ky, 1e-9);
    EXPECT_NEAR(r(2, 2), f.kz, 1e-9);
    EXPECT_NEAR(t.translation.x(), f.px, 1e-9);
    EXPECT_NEAR(t.translation.y(), f.py, 1e-9);
    EXPECT_NEAR(t.translation.z(), f.pz, 1e-9);
    // Corrected forms of the two transcription slips.
    EXPECT_NEAR(r(0, 0), f.ix, 1e-9);
    EXPECT_NEAR(r(1, 1), f.jy, 1e-9);
    ix_printed_gap = std::max(ix_printed_gap, std::abs(r(0, 0) - f.ix_printed));
    jy_printed_gap = std::max(jy_printed_gap, std::abs(r(1, 1) - f.jy_printed));
  }
  // The printed forms are genuinely different functions, not round-off.
  EXPECT_GT(ix_printed_gap, 0.5);
  EXPECT_GT(jy_printed_gap, 0.5);
}

TEST(ForwardKinematics, Orthonormal) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10, 10);
  const ArmModel arm = ArmModel::reference(false);
  for (int n = 0; n < 500; ++n) {
    JointVector q;
    for (auto& v : q.theta) v = u(rng);  // out-of-limit values still evaluate
    const Mat3 r = forward_kinematics(arm, q).rotation;
    EXPECT_LT((r.transpose() * r - Mat3::Identity()).norm(), 1e-9);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-9);
  }
}

TEST(ForwardKinematics, LinkPointsEndAtTool) {
  const ArmModel arm = ArmModel::reference(true);
  const JointVector q{{0.3, 1.0, -0.8, 0.2, 0.1}};
  const auto pts = link_points(arm, q);
  EXPECT_LT((pts.front() - arm.mount.translation).norm(), 1e-15);
  EXPECT_LT((pts.back() - forward_kinematics(arm, q).translation).norm(), 1e-12);
}

TEST(InverseKinematics, RoundTripRecoversPose) {
  std::mt19937_64 rng(21);
  for (bool left : {true, false}) {
    const ArmModel arm = ArmModel::reference(left);
    int recovered = 0;
    for (int n = 0; n < 300; ++n) {
      const JointVector q = random_in_limits(arm, rng);
      const HomogeneousTransform target = forward_kinematics(arm, q);
      try {
        const IKSolutionSet set = inverse_kinematics(arm, target);
        for (const auto& s : set.solutions) {
          EXPECT_LE(s.position_residual, kIkPositionTolerance);
          EXPECT_LE(s.orientation_residual, kIkOrientationTolerance);
        }
        ++recovered;
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kSingular) << e.what();
      }
    }
    EXPECT_GE(recovered, 299);
  }
}

TEST(InverseKinematics, ContainsOriginalJointVectorWhenReachingForward) {
  const ArmModel arm = ArmModel::reference(true);
  const JointVector q{{0.4, 0.9, -1.2, -0.6, 0.3}};
  const IKSolutionSet set = inverse_kinematics(arm, forward_kinematics(arm, q));
  ASSERT_EQ(set.solutions.size(), 2u);
  bool found = false;
  for (const auto& s : set.solutions) found |= joint_distance(s.q, q) < 1e-9;
  EXPECT_TRUE(found);
}

TEST(InverseKinematics, TwoDistinctBranchesInsideWorkspace) {
  const ArmModel arm = ArmModel::reference(true);
  const IKSolutionSet set = inverse_kinematics(arm, gripper_down(arm, Vec3(0.4, 0.15, -0.1)));
  ASSERT_EQ(set.solutions.size(), 2u);
  EXPECT_EQ(set.solutions[0].branch, ElbowBranch::kUp);
  EXPECT_EQ(set.solutions[1].branch, ElbowBranch::kDown);
  EXPECT_GT(joint_distance(set.solutions[0].q, set.solutions[1].q), 0.1);
  EXPECT_LT(set.solutions[0].q[2], 0.0);
  EXPECT_GT(set.solutions[1].q[2], 0.0);
}

TEST(InverseKinematics, BranchesCoincideOnBoundary) {
  const ArmModel arm = ArmModel::reference(true);
  const JointVector stretched{{0.2, 0.5, 0.0, -0.3, 0.1}};
  const IKSolutionSet set = inverse_kinematics(arm, forward_kinematics(arm, stretched));
  ASSERT_EQ(set.solutions.size(), 2u);
  EXPECT_LT(joint_distance(set.solutions[0].q, set.solutions[1].q), 1e-6);
  EXPECT_LT(joint_distance(set.solutions[0].q, stretched), 1e-6);
}

TEST(InverseKinematics, UnreachableBeyondReach) {
  const ArmModel arm = ArmModel::reference(true);
  const double eps = 1e-3;
  const Vec3 far = arm.mount.translation + Vec3(arm.reach() + arm.base_height() + eps, 0, 0);
  try {
    inverse_kinematics(arm, gripper_down(arm, far));
    FAIL() << "expected Unreachable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnreachable);
  }
}

TEST(InverseKinematics, SingularOnShoulderAxis) {
  const ArmModel arm = ArmModel::reference(false);
  HomogeneousTransform t = HomogeneousTransform::identity();
  t.translation = arm.mount.translation + Vec3(0, 0, 0.3);
  try {
    inverse_kinematics(arm, t);
    FAIL() << "expected Singular";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingular);
  }
}

TEST(InverseKinematics, RejectsNonOrthonormalTarget) {
  const ArmModel arm = ArmModel::reference(true);
  HomogeneousTransform t = gripper_down(arm, Vec3(0.4, 0.2, 0.0));
  t.rotation *= 1.1;
  EXPECT_THROW(inverse_kinematics(arm, t), Error);
}

TEST(InverseKinematics, Theta1AxisCases) {
  const ArmModel arm = ArmModel::reference(true);
  const Vec3 base = arm.mount.translation;
  for (const auto& s : inverse_kinematics(arm, gripper_down(arm, base + Vec3(0.5, 0, 0))).solutions) {
    EXPECT_NEAR(s.q[0], 0.0, 1e-12);
  }
  for (const auto& s : inverse_kinematics(arm, gripper_down(arm, base + Vec3(0, 0.5, 0))).solutions) {
    EXPECT_NEAR(s.q[0], kPi / 2, 1e-12);
  }
}

TEST(InverseKinematics, Theta1ReducesToRatioArctangentForPositiveX) {
  const ArmModel arm = ArmModel::reference(true);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ux(0.2, 0.5), uy(-0.3, 0.3), uz(-0.15, 0.1);
  for (int n = 0; n < 100; ++n) {
    const Vec3 local(ux(rng), uy(rng), uz(rng));
    const auto set = inverse_kinematics(arm, gripper_down(arm, arm.mount.translation + local));
    for (const auto& s : set.solutions) EXPECT_NEAR(s.q[0], std::atan(local.y() / local.x()), 1e-12);
  }
}

TEST(InverseKinematics, OutOfLimitSolutionsAreFlaggedNotDropped) {
  ArmModel arm = ArmModel::reference(true);
  arm.joint_limits[2] = {-2.8, -0.01};  // only elbow-up allowed
  const IKSolutionSet set = inverse_kinematics(arm, gripper_down(arm, Vec3(0.4, 0.15, -0.1)));
  ASSERT_EQ(set.solutions.size(), 2u);
  EXPECT_TRUE(set.solutions[0].valid);
  EXPECT_FALSE(set.solutions[1].valid);
  EXPECT_TRUE(set.any_valid());
}

TEST(WithinLimits, ClosedInterval) {
  const ArmModel arm = ArmModel::reference(true);
  JointVector mid;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    mid[i] = 0.5 * (arm.joint_limits[i].min + arm.joint_limits[i].max);
  }
  EXPECT_TRUE(within_limits(arm, mid));
  JointVector over = mid;
  over[1] = arm.joint_limits[1].max + 0.01;
  EXPECT_FALSE(within_limits(arm, over));
  JointVector edge = mid;
  edge[1] = arm.joint_limits[1].max;
  edge[2] = arm.joint_limits[2].min;
  EXPECT_TRUE(within_limits(arm, edge));
}

TEST(ArmModel, ReferenceIsValidAndMirrored) {
  const ArmModel l = ArmModel::reference(true);
  const ArmModel r = ArmModel::reference(false);
  EXPECT_TRUE(l.violations().empty());
  EXPECT_TRUE(r.violations().empty());
  EXPECT_DOUBLE_EQ(l.mount.translation.y(), 0.11);
  EXPECT_DOUBLE_EQ(r.mount.translation.y(), -0.11);
  EXPECT_NEAR(l.reach(), 0.78, 1e-12);
}

TEST(ArmModel, ViolationsReported) {
  ArmModel arm = ArmModel::reference(true);
  arm.joint_limits[3] = {1.0, -1.0};
  arm.rows[1].a = -0.1;
  const auto v = arm.violations();
  EXPECT_GE(v.size(), 2u);
  EXPECT_THROW(arm.validate(), Error);
}
