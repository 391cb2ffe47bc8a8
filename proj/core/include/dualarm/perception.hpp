#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dualarm/geometry.hpp"

namespace dualarm {

/// Ideal pinhole camera with one focal length for both axes.
struct CameraIntrinsics {
  double f = 600.0;  // px
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  std::vector<std::string> violations() const;
};

/// Camera frame -> robot frame: p_robot = rotation * p_camera + translation.
struct CameraExtrinsics {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  std::vector<std::string> violations() const;
};

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

/// One detector record: bounding-box centre and size in pixels, depth sampled
/// at the centre pixel.
struct Detection {
  std::string label;
  double u = 0.0;
  double v = 0.0;
  double width = 0.0;
  double height = 0.0;
  double depth = 0.0;  // m
  double confidence = 1.0;
};

/// Reason the detection is unusable, or nullopt if valid. The reason starts
/// with the error name (e.g. "NonPositiveDepth: ...").
std::optional<std::string> detection_problem(const Detection& det, const CameraIntrinsics& intr);

/// Throws BehindCamera for z <= 0 and FrameMismatch for a robot-frame point.
PixelCoord project(const CameraIntrinsics& intr, const Point3& p);

/// Throws NonPositiveDepth for depth <= 0.
Point3 back_project(const CameraIntrinsics& intr, PixelCoord pixel, double depth);

/// Throws FrameMismatch unless p is in the camera frame.
Point3 camera_to_robot(const CameraExtrinsics& extr, const Point3& p);

/// Inverse of camera_to_robot.
Point3 robot_to_camera(const CameraExtrinsics& extr, const Point3& p);

Point3 detection_to_grasp_target(const CameraIntrinsics& intr, const CameraExtrinsics& extr,
                                 const Detection& det);

}  // namespace dualarm
