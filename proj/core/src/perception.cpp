#include "dualarm/perception.hpp"

#include <cmath>

#include "dualarm/error.hpp"

namespace dualarm {

std::vector<std::string> CameraIntrinsics::violations() const {
  std::vector<std::string> out;
  if (!(f > 0.0) || !std::isfinite(f)) out.push_back("f: focal length must be > 0");
  if (width <= 0) out.push_back("width: must be > 0");
  if (height <= 0) out.push_back("height: must be > 0");
  if (!(cx >= 0.0 && cx < width)) out.push_back("cx: must lie in [0, width)");
  if (!(cy >= 0.0 && cy < height)) out.push_back("cy: must lie in [0, height)");
  return out;
}

std::vector<std::string> CameraExtrinsics::violations() const {
  std::vector<std::string> out;
  if (!is_rotation(rotation)) out.push_back("rotation: not a proper rotation (R^T R = I, det = +1)");
  if (!translation.allFinite()) out.push_back("translation: not finite");
  return out;
}

std::optional<std::string> detection_problem(const Detection& det, const CameraIntrinsics& intr) {
  if (det.label.empty()) return "InvalidArgument: empty label";
  if (!(det.depth > 0.0) || !std::isfinite(det.depth)) return "NonPositiveDepth: depth must be > 0";
  if (!(det.u >= 0.0 && det.u < intr.width && det.v >= 0.0 && det.v < intr.height))
    return "InvalidArgument: centre outside the image";
  if (!(det.width >= 0.0 && det.height >= 0.0)) return "InvalidArgument: negative bbox size";
  if (!(det.confidence >= 0.0 && det.confidence <= 1.0))
    return "InvalidArgument: confidence outside [0, 1]";
  return std::nullopt;
}

PixelCoord project(const CameraIntrinsics& intr, const Point3& p) {
  if (p.frame != Frame::kCamera) throw Error(ErrorCode::kFrameMismatch, "project expects a camera-frame point");
  if (!(p.xyz.z() > 0.0)) throw Error(ErrorCode::kBehindCamera, "point is behind the camera (z <= 0)");
  return {intr.f * p.xyz.x() / p.xyz.z() + intr.cx, intr.f * p.xyz.y() / p.xyz.z() + intr.cy};
}

Point3 back_project(const CameraIntrinsics& intr, PixelCoord pixel, double depth) {
  if (!(depth > 0.0)) throw Error(ErrorCode::kNonPositiveDepth, "depth must be > 0");
  return Point3::camera(depth * (pixel.u - intr.cx) / intr.f, depth * (pixel.v - intr.cy) / intr.f, depth);
}

Point3 camera_to_robot(const CameraExtrinsics& extr, const Point3& p) {
  if (p.frame != Frame::kCamera) throw Error(ErrorCode::kFrameMismatch, "camera_to_robot expects a camera-frame point");
  return {extr.rotation * p.xyz + extr.translation, Frame::kRobot};
}

Point3 robot_to_camera(const CameraExtrinsics& extr, const Point3& p) {
  if (p.frame != Frame::kRobot) throw Error(ErrorCode::kFrameMismatch, "robot_to_camera expects a robot-frame point");
  return {extr.rotation.transpose() * (p.xyz - extr.translation), Frame::kCamera};
}

Point3 detection_to_grasp_target(const CameraIntrinsics& intr, const CameraExtrinsics& extr,
                                 const Detection& det) {
  return camera_to_robot(extr, back_project(intr, {det.u, det.v}, det.depth));
}

}  // namespace dualarm
