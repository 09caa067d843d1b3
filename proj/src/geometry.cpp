#include "bevkit/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "bevkit/error.hpp"

namespace bevkit {

Pose::Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t, int id)
    : rotation(q), translation(t), frame_id(id) {
  if (frame_id < 0) {
    throw InputError("pose frame_id must be non-negative");
  }
  const double norm = rotation.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-3) {
    throw InputError("pose quaternion norm deviates from 1 by more than 1e-3");
  }
  rotation.normalize();
}

double rotation_geodesic(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  const Eigen::Matrix3d rel = a.toRotationMatrix().transpose() * b.toRotationMatrix();
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

double pose_distance_sq(const Pose& a, const Pose& b, const GeometryParams& p) {
  const double dt = (a.translation - b.translation).squaredNorm() / (p.sigma_t * p.sigma_t);
  const double angle = rotation_geodesic(a.rotation, b.rotation);
  return dt + p.beta * p.beta * angle * angle;
}

double pose_affinity(double d_sq) { return std::exp(-0.5 * d_sq); }

}  // namespace bevkit
