#include "dualarm/geometry.hpp"

#include <cmath>

namespace dualarm {

HomogeneousTransform HomogeneousTransform::from_matrix(const Mat4& m) {
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

HomogeneousTransform HomogeneousTransform::rot_x(double angle) {
  HomogeneousTransform t;
  t.rotation = Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix();
  return t;
}

HomogeneousTransform HomogeneousTransform::rot_z(double angle) {
  HomogeneousTransform t;
  t.rotation = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
  return t;
}

HomogeneousTransform HomogeneousTransform::trans_x(double distance) {
  HomogeneousTransform t;
  t.translation.x() = distance;
  return t;
}

HomogeneousTransform HomogeneousTransform::trans_z(double distance) {
  HomogeneousTransform t;
  t.translation.z() = distance;
  return t;
}

Mat4 HomogeneousTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

HomogeneousTransform HomogeneousTransform::inverse() const {
  const Mat3 rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

double rotation_distance(const Mat3& a, const Mat3& b) {
  const Mat3 d = a.transpose() * b;
  // atan2 of the skew and symmetric parts keeps precision for tiny angles,
  // where acos((tr - 1) / 2) loses half the digits.
  const Vec3 skew(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1));
  return std::atan2(0.5 * skew.norm(), 0.5 * (d.trace() - 1.0));
}

Mat3 rotation_from_rpy(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

double wrap_angle(double angle) {
  double w = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

const char* to_string(Frame frame) {
  return frame == Frame::kCamera ? "camera" : "robot";
}

}  // namespace dualarm
