#include "bevkit/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "bevkit/error.hpp"

namespace bevkit {

PointCloud backproject_depth(const DepthMap& depth, const Intrinsics& K,
                             const Pose& pose, int stride) {
  if (stride < 1) {
    throw InputError("backproject_depth: stride must be >= 1");
  }
  if (depth.width != K.width || depth.height != K.height) {
    throw InputError("backproject_depth: depth dimensions do not match intrinsics");
  }
  if (static_cast<std::size_t>(depth.width) * depth.height != depth.values.size()) {
    throw InputError("backproject_depth: depth buffer size mismatch");
  }

  const Eigen::Matrix3d R_t = pose.rotation_matrix().transpose();
  const Eigen::Vector3d& t = pose.translation;

  const int cols = (depth.width + stride - 1) / stride;
  const int rows = (depth.height + stride - 1) / stride;

  // Per-sample slots keep the output order independent of thread count.
  std::vector<Eigen::Vector3d> slots(static_cast<std::size_t>(cols) * rows);
  std::vector<char> valid(slots.size(), 0);

#pragma omp parallel for schedule(static)
  for (int rv = 0; rv < rows; ++rv) {
    const int v = rv * stride;
    for (int ru = 0; ru < cols; ++ru) {
      const int u = ru * stride;
      const double d = depth.at(u, v);
      if (!(d > 0.0) || !std::isfinite(d)) continue;
      const Eigen::Vector3d ray((u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0);
      const std::size_t slot = static_cast<std::size_t>(rv) * cols + ru;
      slots[slot] = R_t * (d * ray - t);
      valid[slot] = 1;
    }
  }

  PointCloud pc;
  pc.points.reserve(slots.size());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (valid[s]) pc.points.push_back(slots[s]);
  }
  return pc;
}

Eigen::Vector3d project_point(const Eigen::Vector3d& X, const Intrinsics& K,
                              const Pose& pose) {
  const Eigen::Vector3d p_cam = pose.rotation_matrix() * X + pose.translation;
  return {K.fx * p_cam.x() / p_cam.z() + K.cx,
          K.fy * p_cam.y() / p_cam.z() + K.cy,
          p_cam.z()};
}

namespace {

Eigen::Vector3d rotated_extents(const PointCloud& pc, const Eigen::Matrix3d& R,
                                Eigen::Vector3d* lo_out = nullptr) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
#pragma omp parallel
  {
    Eigen::Vector3d tlo = lo, thi = hi;
#pragma omp for schedule(static) nowait
    for (long i = 0; i < static_cast<long>(pc.points.size()); ++i) {
      const Eigen::Vector3d q = R * pc.points[i];
      tlo = tlo.cwiseMin(q);
      thi = thi.cwiseMax(q);
    }
#pragma omp critical
    {
      lo = lo.cwiseMin(tlo);
      hi = hi.cwiseMax(thi);
    }
  }
  if (lo_out) *lo_out = lo;
  return hi - lo;
}

double box_volume(const PointCloud& pc, const Eigen::Matrix3d& R) {
  const Eigen::Vector3d e = rotated_extents(pc, R);
  return e.x() * e.y() * e.z();
}

Eigen::Matrix3d euler_offset(int axis, double deg) {
  const double rad = deg * std::numbers::pi / 180.0;
  return Eigen::AngleAxisd(rad, Eigen::Matrix3d::Identity().col(axis)).toRotationMatrix();
}

}  // namespace

ObbFrame fit_obb(const PointCloud& pc) {
  const long n = static_cast<long>(pc.points.size());
  if (n == 0) {
    throw DegeneracyError("fit_obb: empty point cloud", 0);
  }

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pc.points) mean += p;
  mean /= static_cast<double>(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pc.points) {
    const Eigen::Vector3d d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d evals = eig.eigenvalues();
  const double emax = std::max(evals.maxCoeff(), 0.0);
  int rank = 0;
  for (int i = 0; i < 3; ++i) {
    if (evals[i] > std::max(emax * 1e-10, 1e-18)) ++rank;
  }
  // Four non-coplanar points are the minimum for a three-dimensional cloud.
  if (n < 4 || rank < 3) {
    throw DegeneracyError("fit_obb: point cloud rank below 3", rank);
  }

  // PCA frame as the starting rotation (global -> box).
  Eigen::Matrix3d R = eig.eigenvectors().transpose();
  if (R.determinant() < 0.0) R.row(2) = -R.row(2);
  double best_vol = box_volume(pc, R);

  // Coordinate descent on per-axis angle offsets, halving the step from 10
  // degrees until below 0.15.
  for (double step = 10.0; step >= 0.15; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int axis = 0; axis < 3; ++axis) {
        for (double sign : {1.0, -1.0}) {
          const Eigen::Matrix3d cand = euler_offset(axis, sign * step) * R;
          const double vol = box_volume(pc, cand);
          if (vol < best_vol - 1e-15) {
            best_vol = vol;
            R = cand;
            improved = true;
          }
        }
      }
    }
  }

  Eigen::Vector3d lo;
  const Eigen::Vector3d ext = rotated_extents(pc, R, &lo);

  // Sort extents descending, permuting rotation rows to match.
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return ext[a] > ext[b]; });
  ObbFrame obb;
  for (int i = 0; i < 3; ++i) {
    obb.rotation.row(i) = R.row(order[i]);
    obb.extents[i] = ext[order[i]];
  }
  // Canonical row signs: the dominant component of the first two axes points
  // positive, the third completes a proper frame. Axis signs are otherwise
  // arbitrary, and downstream flip detection needs a deterministic baseline.
  for (int i = 0; i < 2; ++i) {
    int dominant = 0;
    for (int j = 1; j < 3; ++j) {
      if (std::abs(obb.rotation(i, j)) > std::abs(obb.rotation(i, dominant))) dominant = j;
    }
    if (obb.rotation(i, dominant) < 0.0) obb.rotation.row(i) = -obb.rotation.row(i);
  }
  obb.rotation.row(2) = obb.rotation.row(0).cross(obb.rotation.row(1));

  Eigen::Vector3d mid_box;
  const Eigen::Vector3d ext2 = rotated_extents(pc, obb.rotation, &lo);
  mid_box = lo + 0.5 * ext2;
  obb.center = obb.rotation.transpose() * mid_box;
  return obb;
}

double percentile(const std::vector<double>& values, double p) {
  if (values.empty()) {
    throw InputError("percentile: empty input");
  }
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const long n = static_cast<long>(sorted.size());
  long idx = static_cast<long>(std::ceil(p / 100.0 * static_cast<double>(n))) - 1;
  idx = std::clamp(idx, 0L, n - 1);
  return sorted[static_cast<std::size_t>(idx)];
}

GroundSpans estimate_ground_axis(const std::vector<double>& z_values) {
  if (z_values.size() < 20) {
    throw InputError("estimate_ground_axis: need at least 20 samples");
  }
  GroundSpans s;
  const double z0 = percentile(z_values, 0.0);
  const double z5 = percentile(z_values, 5.0);
  const double z95 = percentile(z_values, 95.0);
  const double z100 = percentile(z_values, 100.0);
  s.bottom = z5 - z0;
  s.top = z100 - z95;
  if (std::abs(s.bottom - s.top) < 1e-9) {
    s.side = GroundSide::LowEnd;
    s.tie_warning = true;
  } else {
    s.side = s.bottom < s.top ? GroundSide::LowEnd : GroundSide::HighEnd;
  }
  return s;
}

AlignResult align_to_ground(const PointCloud& pc, const ObbFrame& obb) {
  AlignResult out;
  // Extents are sorted descending, so box Z is already the smallest extent.
  Eigen::Matrix3d R = obb.rotation;

  std::vector<double> z(pc.points.size());
  for (std::size_t i = 0; i < pc.points.size(); ++i) {
    z[i] = R.row(2).dot(pc.points[i]);
  }
  const GroundSpans spans = estimate_ground_axis(z);
  out.tie_warning = spans.tie_warning;

  if (spans.side == GroundSide::HighEnd) {
    // Rotate half a turn about box X: z flips, the frame stays proper.
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(1, 1) = -1.0;
    flip(2, 2) = -1.0;
    R = flip * R;
    for (double& v : z) v = -v;
    out.flipped = true;
  }

  const double z5 = percentile(z, 5.0);
  out.transform.rotation = R;
  out.transform.translation = Eigen::Vector3d(0.0, 0.0, -z5);

  out.aligned.points.resize(pc.points.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(pc.points.size()); ++i) {
    out.aligned.points[i] = out.transform.apply(pc.points[i]);
  }

  if (obb.extents[2] > 0.0 && obb.extents[1] / obb.extents[2] < 1.2) {
    out.thin_scene_warning = true;
  }
  return out;
}

double auto_cell_size(const PointCloud& aligned, int max_dim) {
  if (aligned.points.empty()) {
    throw InputError("auto_cell_size: empty cloud");
  }
  Eigen::Vector2d lo(std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  for (const auto& p : aligned.points) {
    lo = lo.cwiseMin(p.head<2>());
    hi = hi.cwiseMax(p.head<2>());
  }
  const double extent = std::max((hi - lo).maxCoeff(), 0.0);
  if (extent <= 0.0) return 0.1;

  double cell = extent / max_dim;
  // floor(extent/cell)+1 can still exceed max_dim on exact multiples.
  while (static_cast<long>(std::floor(extent / cell)) + 1 > max_dim) {
    cell *= 1.0 + 1e-9;
  }
  return cell;
}

BevGrid rasterize_bev(const PointCloud& aligned, double cell_size) {
  if (aligned.points.empty()) {
    throw InputError("rasterize_bev: empty cloud");
  }
  if (!(cell_size > 0.0)) {
    throw InputError("rasterize_bev: cell_size must be > 0");
  }

  Eigen::Vector2d lo(std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  for (const auto& p : aligned.points) {
    lo = lo.cwiseMin(p.head<2>());
    hi = hi.cwiseMax(p.head<2>());
  }

  BevGrid g;
  g.meta.cell_size = cell_size;
  g.meta.origin = lo;
  g.meta.width = static_cast<int>(std::floor((hi.x() - lo.x()) / cell_size)) + 1;
  g.meta.height = static_cast<int>(std::floor((hi.y() - lo.y()) / cell_size)) + 1;

  const std::size_t cells = static_cast<std::size_t>(g.meta.width) * g.meta.height;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  g.occupancy.assign(cells, 0.0f);
  g.min_z.assign(cells, nan);
  g.max_z.assign(cells, nan);
  g.mean_z.assign(cells, nan);

  std::vector<double> sum_z(cells, 0.0);
  for (const auto& p : aligned.points) {
    const int cx = static_cast<int>(std::floor((p.x() - lo.x()) / cell_size));
    const int cy = static_cast<int>(std::floor((p.y() - lo.y()) / cell_size));
    const std::size_t c = g.cell_index(std::clamp(cx, 0, g.meta.width - 1),
                                       std::clamp(cy, 0, g.meta.height - 1));
    const float z = static_cast<float>(p.z());
    if (g.occupancy[c] == 0.0f) {
      g.min_z[c] = z;
      g.max_z[c] = z;
    } else {
      g.min_z[c] = std::min(g.min_z[c], z);
      g.max_z[c] = std::max(g.max_z[c], z);
    }
    g.occupancy[c] += 1.0f;
    sum_z[c] += p.z();
  }
  for (std::size_t c = 0; c < cells; ++c) {
    if (g.occupancy[c] > 0.0f) {
      g.mean_z[c] = static_cast<float>(sum_z[c] / g.occupancy[c]);
    }
  }
  return g;
}

Eigen::Vector2d heading_direction(double r_deg) {
  const double rad = r_deg * std::numbers::pi / 180.0;
  return {-std::sin(rad), -std::cos(rad)};
}

double direction_heading(const Eigen::Vector2d& dir) {
  double deg = std::atan2(-dir.x(), -dir.y()) * 180.0 / std::numbers::pi;
  deg = std::fmod(deg, 360.0);
  if (deg < 0.0) deg += 360.0;
  return deg;
}

BevPose camera_to_bev_pose(const Pose& pose, const GroundTransform& ground,
                           const GridMeta& grid) {
  BevPose bev;
  const Eigen::Vector3d center = ground.apply(pose.camera_center());
  bev.x = (center.x() - grid.origin.x()) / grid.cell_size;
  bev.y = (center.y() - grid.origin.y()) / grid.cell_size;

  const Eigen::Vector3d fwd = ground.rotation * pose.forward_world();
  const Eigen::Vector2d planar = fwd.head<2>();
  if (planar.norm() < 1e-6) {
    bev.r = 0.0;
    bev.degenerate_heading = true;
  } else {
    bev.r = direction_heading(planar.normalized());
  }
  return bev;
}

}  // namespace bevkit
