#pragma once

#include <cstdint>
#include <vector>

#include "bevkit/geometry.hpp"
#include "bevkit/scene.hpp"
#include "bevkit/semantic.hpp"

namespace bevkit {

/// Parametric rectangular room with furniture boxes and a circular camera
/// path. Every quantity is reproducible from the seed, so end-to-end tests
/// carry their own ground truth.
struct RoomSpec {
  double width = 6.0;   // x extent, meters
  double depth = 5.0;   // y extent
  double height = 2.6;  // z extent
  int frames = 500;
  int cloud_points = 200000;
  int furniture = 3;
  double noise = 0.005;  // surface sampling noise, meters
  std::uint64_t seed = 0;
  // depth rendering
  int image_width = 96;
  int image_height = 72;
  double focal = 60.0;  // pixels
};

struct FurnitureBox {
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;
};

struct SyntheticScene {
  RoomSpec spec;
  std::vector<Pose> trajectory;
  PointCloud cloud;  // room coordinates, ground plane at z = 0
  SemanticScores scores;
  std::vector<FurnitureBox> furniture;
  /// BEV heading of each camera in room axes under the pixel convention;
  /// pipeline output matches these up to the in-plane gauge of the ground
  /// alignment.
  std::vector<double> true_headings;

  Intrinsics intrinsics() const;
};

SyntheticScene generate_room_scene(const RoomSpec& spec);

/// Ray-cast depth of one frame against the room shell and furniture boxes;
/// exact for the analytic surfaces, so back-projection reproduces them.
DepthMap render_depth(const SyntheticScene& scene, int frame_index);

/// Random smooth pose sequence (jittered walk), frame ids 0..n-1. Handy for
/// randomized kernel and selection instances.
std::vector<Pose> random_trajectory(int n, std::uint64_t seed);

/// Two well-separated pose clusters of equal size, cluster A first.
std::vector<Pose> two_cluster_trajectory(int per_cluster, double separation,
                                         std::uint64_t seed);

}  // namespace bevkit
