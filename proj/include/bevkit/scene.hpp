#pragma once

#include <vector>

#include <Eigen/Core>

#include "bevkit/geometry.hpp"

namespace bevkit {

struct Intrinsics {
  double fx = 1.0, fy = 1.0;
  double cx = 0.0, cy = 0.0;
  int width = 1, height = 1;
};

/// Dense depth image, row-major, meters; non-positive values are invalid.
struct DepthMap {
  int frame_id = 0;
  int width = 0, height = 0;
  std::vector<float> values;

  float at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
};

struct PointCloud {
  std::vector<Eigen::Vector3d> points;
};

/// Oriented bounding box frame: rotation maps global to box coordinates,
/// extents are side lengths sorted descending (rows permuted to match).
struct ObbFrame {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d extents = Eigen::Vector3d::Zero();

  double volume() const { return extents.x() * extents.y() * extents.z(); }
};

enum class GroundSide { LowEnd, HighEnd };

struct GroundSpans {
  GroundSide side = GroundSide::LowEnd;
  double bottom = 0.0;  // z(5) - z(0)
  double top = 0.0;     // z(100) - z(95)
  bool tie_warning = false;
};

/// Rigid map into the ground-aligned frame: aligned = rotation * p + translation.
struct GroundTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
};

struct AlignResult {
  GroundTransform transform;
  PointCloud aligned;
  bool flipped = false;            // ground was detected at the high end
  bool tie_warning = false;        // percentile spans tied
  bool thin_scene_warning = false; // second/third extents too close (l_y/l_z < 1.2)
};

/// Grid cell metadata; origin is the world XY coordinate of the corner of
/// cell (0, 0), and points map to cells by floor((p - origin) / cell_size).
struct GridMeta {
  double cell_size = 0.1;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  int width = 0, height = 0;
};

/// Top-down raster of the aligned cloud. Channels are stored as planes;
/// cells with zero occupancy carry NaN heights.
struct BevGrid {
  GridMeta meta;
  std::vector<float> occupancy;
  std::vector<float> min_z;
  std::vector<float> max_z;
  std::vector<float> mean_z;

  std::size_t cell_index(int cx, int cy) const {
    return static_cast<std::size_t>(cy) * meta.width + cx;
  }
};

/// Pose on the BEV raster: real-valued cell coordinates plus heading in
/// degrees, wrapped to [0, 360). Heading r points along (-sin r, -cos r) in
/// pixel axes (x right, y down): r=0 up, r=90 left, r=180 down, r=270 right.
struct BevPose {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  bool degenerate_heading = false;  // camera looked along the vertical
};

/// Back-projects valid depth samples on the stride grid into world points:
/// X = R^T (depth * K^{-1} * [u, v, 1] - t). Points appear in row-major pixel
/// order.
PointCloud backproject_depth(const DepthMap& depth, const Intrinsics& K,
                             const Pose& pose, int stride);

/// Projects a world point back to pixel coordinates and depth; inverse of
/// backproject_depth for valid samples.
Eigen::Vector3d project_point(const Eigen::Vector3d& X, const Intrinsics& K,
                              const Pose& pose);  // (u, v, depth)

/// Minimal-volume box fit: PCA initialization followed by coordinate descent
/// over Euler-angle offsets with step halving from 10 to below 0.15 degrees.
/// Throws DegeneracyError when the cloud does not span three dimensions.
ObbFrame fit_obb(const PointCloud& pc);

/// Nearest-rank percentile: sorted element at index ceil(p/100 * n) - 1,
/// clamped; p = 0 returns the minimum.
double percentile(const std::vector<double>& values, double p);

/// Decides which end of the vertical axis is the ground by comparing the 5%
/// spans at both ends; the tighter cluster wins. Requires >= 20 samples.
GroundSpans estimate_ground_axis(const std::vector<double>& z_values);

/// Rotates the cloud into the box frame with the smallest extent as Z, flips
/// so the ground ends up at the low end, and shifts z so the 5th height
/// percentile sits at 0.
AlignResult align_to_ground(const PointCloud& pc, const ObbFrame& obb);

/// Cell size such that the larger grid dimension stays within max_dim cells.
double auto_cell_size(const PointCloud& aligned, int max_dim = 256);

BevGrid rasterize_bev(const PointCloud& aligned, double cell_size);

/// Maps a camera pose through the ground transform onto the raster and
/// derives the heading from the projected optical axis. A camera looking
/// straight along the vertical gets r = 0 with the degeneracy flag set.
BevPose camera_to_bev_pose(const Pose& pose, const GroundTransform& ground,
                           const GridMeta& grid);

/// Unit direction of a BEV heading in pixel axes: (-sin r, -cos r).
Eigen::Vector2d heading_direction(double r_deg);

/// Inverse of heading_direction, result in [0, 360).
double direction_heading(const Eigen::Vector2d& dir);

}  // namespace bevkit
