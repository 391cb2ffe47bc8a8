#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dualarm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;

/// Rigid transform with an implicit [0 0 0 1] bottom row. Rotation columns
/// are the i, j, k axes of the moving frame expressed in the fixed frame.
struct HomogeneousTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static HomogeneousTransform identity() { return {}; }
  static HomogeneousTransform from_matrix(const Mat4& m);
  static HomogeneousTransform rot_x(double angle);
  static HomogeneousTransform rot_z(double angle);
  static HomogeneousTransform trans_x(double distance);
  static HomogeneousTransform trans_z(double distance);

  Mat4 matrix() const;
  HomogeneousTransform inverse() const;
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  friend HomogeneousTransform operator*(const HomogeneousTransform& lhs,
                                        const HomogeneousTransform& rhs) {
    return {lhs.rotation * rhs.rotation, lhs.rotation * rhs.translation + lhs.translation};
  }
};

/// True when R^T R = I and det R = +1, both within `tol`.
bool is_rotation(const Mat3& r, double tol = 1e-9);

/// Geodesic angle between two rotations (rad), accurate near zero.
double rotation_distance(const Mat3& a, const Mat3& b);

/// Fixed-axis roll/pitch/yaw: Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 rotation_from_rpy(double roll, double pitch, double yaw);

/// Wraps into (-pi, pi].
double wrap_angle(double angle);

enum class Frame { kCamera, kRobot };

struct Point3 {
  Vec3 xyz = Vec3::Zero();
  Frame frame = Frame::kRobot;

  static Point3 camera(double x, double y, double z) { return {Vec3(x, y, z), Frame::kCamera}; }
  static Point3 robot(double x, double y, double z) { return {Vec3(x, y, z), Frame::kRobot}; }
  static Point3 robot(const Vec3& v) { return {v, Frame::kRobot}; }
};

const char* to_string(Frame frame);

}  // namespace dualarm
