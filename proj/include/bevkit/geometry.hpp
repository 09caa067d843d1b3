#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace bevkit {

/// Scales of the rigid-pose metric: sigma_t normalizes translation (meters),
/// beta weights the rotation angle (radians) against it.
struct GeometryParams {
  double sigma_t = 1.0;
  double beta = 2.0;
};

/// Rigid camera pose. The stored (rotation, translation) follow the
/// projection convention p_cam = R * X_world + t, so the camera center in
/// world coordinates is -R^T * t.
///
/// The quaternion is (w, x, y, z) and is normalized on construction; inputs
/// whose norm deviates from 1 by more than 1e-3 are rejected.
struct Pose {
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d translation{0.0, 0.0, 0.0};
  int frame_id = 0;

  Pose() = default;
  Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t, int frame_id);

  Eigen::Matrix3d rotation_matrix() const { return rotation.toRotationMatrix(); }

  Eigen::Vector3d camera_center() const {
    return -(rotation.toRotationMatrix().transpose() * translation);
  }

  /// Camera forward axis (optical axis direction) in world coordinates.
  Eigen::Vector3d forward_world() const {
    return rotation.toRotationMatrix().transpose() * Eigen::Vector3d::UnitZ();
  }
};

/// Geodesic angle between two unit quaternions via the rotation-matrix trace,
/// in [0, pi]. The arccos argument is clamped to [-1, 1]; round-off near 0 or
/// pi is routine, not exceptional.
double rotation_geodesic(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

/// Squared scale-aware rigid distance:
/// ||t_i - t_j||^2 / sigma_t^2 + beta^2 * angle(R_i, R_j)^2.
double pose_distance_sq(const Pose& a, const Pose& b, const GeometryParams& p);

/// Gaussian affinity exp(-d_sq / 2), in (0, 1].
double pose_affinity(double d_sq);

}  // namespace bevkit
