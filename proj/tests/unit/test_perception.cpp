#include <gtest/gtest.h>

#include <random>

#include "dualarm/error.hpp"
#include "dualarm/perception.hpp"

using namespace dualarm;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(Project, OpticalAxisHitsPrincipalPoint) {
  const CameraIntrinsics intr;
  const PixelCoord px = project(intr, Point3::camera(0, 0, 2.5));
  EXPECT_EQ(px.u, 320.0);
  EXPECT_EQ(px.v, 240.0);
}

TEST(Project, ReferenceValue) {
  const PixelCoord px = project(CameraIntrinsics{}, Point3::camera(0.1, 0, 1.0));
  EXPECT_NEAR(px.u, 380.0, 1e-12);
  EXPECT_NEAR(px.v, 240.0, 1e-12);
}

TEST(Project, ScaleInvariant) {
  const CameraIntrinsics intr;
  const PixelCoord a = project(intr, Point3::camera(0.12, -0.07, 0.9));
  const PixelCoord b = project(intr, Point3::camera(0.24, -0.14, 1.8));
  EXPECT_NEAR(a.u, b.u, 1e-12);
  EXPECT_NEAR(a.v, b.v, 1e-12);
}

TEST(Project, Errors) {
  EXPECT_EQ(code_of([] { project(CameraIntrinsics{}, Point3::camera(0, 0, 0)); }), ErrorCode::kBehindCamera);
  EXPECT_EQ(code_of([] { project(CameraIntrinsics{}, Point3::camera(0, 0, -1)); }), ErrorCode::kBehindCamera);
  EXPECT_EQ(code_of([] { project(CameraIntrinsics{}, Point3::robot(0, 0, 1)); }), ErrorCode::kFrameMismatch);
}

TEST(BackProject, PrincipalPointAndReference) {
  const CameraIntrinsics intr;
  const Point3 p = back_project(intr, {320, 240}, 1.5);
  EXPECT_EQ(p.frame, Frame::kCamera);
  EXPECT_EQ(p.xyz, Vec3(0, 0, 1.5));
  const Point3 q = back_project(intr, {380, 240}, 1.0);
  EXPECT_NEAR(q.xyz.x(), 0.1, 1e-15);
  EXPECT_NEAR(q.xyz.y(), 0.0, 1e-15);
  EXPECT_EQ(q.xyz.z(), 1.0);
}

TEST(BackProject, NonPositiveDepth) {
  EXPECT_EQ(code_of([] { back_project(CameraIntrinsics{}, {1, 1}, 0.0); }), ErrorCode::kNonPositiveDepth);
  EXPECT_EQ(code_of([] { back_project(CameraIntrinsics{}, {1, 1}, -2.0); }), ErrorCode::kNonPositiveDepth);
}

TEST(BackProject, InvertsProjection) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> xy(-2, 2), z(0.05, 5);
  const CameraIntrinsics intr{550.0, 300.5, 250.25, 640, 480};
  for (int n = 0; n < 2000; ++n) {
    const Point3 p = Point3::camera(xy(rng), xy(rng), z(rng));
    const Point3 back = back_project(intr, project(intr, p), p.xyz.z());
    EXPECT_LT((back.xyz - p.xyz).norm(), 1e-9);
  }
}

TEST(CameraToRobot, IdentityAndTranslation) {
  CameraExtrinsics e;
  EXPECT_EQ(camera_to_robot(e, Point3::camera(1, 2, 3)).xyz, Vec3(1, 2, 3));
  e.translation = Vec3(0, 0, 0.5);
  const Point3 r = camera_to_robot(e, Point3::camera(0, 0, 1));
  EXPECT_EQ(r.frame, Frame::kRobot);
  EXPECT_EQ(r.xyz, Vec3(0, 0, 1.5));
}

TEST(CameraToRobot, QuarterTurnAboutZ) {
  CameraExtrinsics e;
  e.rotation << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  const Point3 r = camera_to_robot(e, Point3::camera(1, 0, 0));
  EXPECT_NEAR((r.xyz - Vec3(0, 1, 0)).norm(), 0.0, 1e-15);
}

TEST(CameraToRobot, FrameChecked) {
  EXPECT_EQ(code_of([] { camera_to_robot(CameraExtrinsics{}, Point3::robot(0, 0, 1)); }), ErrorCode::kFrameMismatch);
  EXPECT_EQ(code_of([] { robot_to_camera(CameraExtrinsics{}, Point3::camera(0, 0, 1)); }), ErrorCode::kFrameMismatch);
}

TEST(CameraToRobot, RigidAndInvertible) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int n = 0; n < 200; ++n) {
    CameraExtrinsics e;
    e.rotation = rotation_from_rpy(u(rng), u(rng), u(rng));
    e.translation = Vec3(u(rng), u(rng), u(rng));
    const Point3 a = Point3::camera(u(rng), u(rng), u(rng));
    const Point3 b = Point3::camera(u(rng), u(rng), u(rng));
    const Point3 ra = camera_to_robot(e, a), rb = camera_to_robot(e, b);
    EXPECT_NEAR((ra.xyz - rb.xyz).norm(), (a.xyz - b.xyz).norm(), 1e-9);
    EXPECT_NEAR((ra.xyz - e.translation).norm(), a.xyz.norm(), 1e-9);
    EXPECT_LT((robot_to_camera(e, ra).xyz - a.xyz).norm(), 1e-9);
  }
}

TEST(GraspTarget, Composition) {
  const CameraIntrinsics intr;
  Detection det{"box", 320, 240, 40, 30, 1.0, 0.9};
  EXPECT_EQ(detection_to_grasp_target(intr, CameraExtrinsics{}, det).xyz, Vec3(0, 0, 1.0));

  CameraExtrinsics e;
  e.rotation = rotation_from_rpy(0.3, -0.2, 1.1);
  e.translation = Vec3(0.1, -0.2, 0.9);
  det.u = 401.5;
  det.v = 123.25;
  det.depth = 0.85;
  const Point3 manual = camera_to_robot(e, back_project(intr, {det.u, det.v}, det.depth));
  EXPECT_EQ(detection_to_grasp_target(intr, e, det).xyz, manual.xyz);
}

TEST(GraspTarget, PropagatesNonPositiveDepth) {
  const Detection det{"box", 320, 240, 40, 30, 0.0, 0.9};
  EXPECT_EQ(code_of([&] { detection_to_grasp_target(CameraIntrinsics{}, CameraExtrinsics{}, det); }),
            ErrorCode::kNonPositiveDepth);
}

TEST(Detection, ProblemsNamed) {
  const CameraIntrinsics intr;
  EXPECT_FALSE(detection_problem({"box", 10, 10, 5, 5, 1.0, 0.5}, intr));
  auto depth = detection_problem({"box", 10, 10, 5, 5, -1.0, 0.5}, intr);
  ASSERT_TRUE(depth);
  EXPECT_NE(depth->find("NonPositiveDepth"), std::string::npos);
  EXPECT_TRUE(detection_problem({"box", 700, 10, 5, 5, 1.0, 0.5}, intr));
  EXPECT_TRUE(detection_problem({"box", 10, 10, 5, 5, 1.0, 1.5}, intr));
  EXPECT_TRUE(detection_problem({"", 10, 10, 5, 5, 1.0, 0.5}, intr));
}

TEST(Intrinsics, Violations) {
  EXPECT_TRUE(CameraIntrinsics{}.violations().empty());
  EXPECT_FALSE(CameraIntrinsics({-600, 320, 240, 640, 480}).violations().empty());
  EXPECT_FALSE(CameraIntrinsics({600, 640, 240, 640, 480}).violations().empty());
  CameraExtrinsics e;
  e.rotation(0, 0) = -1;
  EXPECT_FALSE(e.violations().empty());
}
