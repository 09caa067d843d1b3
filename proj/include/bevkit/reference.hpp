#pragma once

#include <vector>

#include <Eigen/Core>

#include "bevkit/dpp.hpp"
#include "bevkit/geometry.hpp"
#include "bevkit/grounding.hpp"
#include "bevkit/scene.hpp"

// Serial reference implementations of the parallel kernels. These are kept
// deliberately independent of the production code paths (different loop
// structure, no incremental state) so tests can compare the two routes and
// the benchmark can measure the gap.
namespace bevkit::reference {

/// Dense banded affinity built entry by entry with plain loops.
Eigen::MatrixXd banded_affinity_dense(const std::vector<Pose>& poses,
                                      const GeometryParams& p, int bandwidth);

/// Heat kernel through Eigen matrix products instead of the per-entry loop.
Eigen::MatrixXd heat_kernel_dense(const Eigen::MatrixXd& L, double tau);

/// Greedy MAP that recomputes log det from scratch for every candidate at
/// every step; same selection contract as greedy_map, cubic cost per step.
SelectionResult greedy_map_naive(const LEnsemble& L, int k);

/// Single-threaded retrieval scan with an independently coded scorer.
QueryResult retrieve_scan(const BevPose& query, const FramePoseTable& table,
                          const GroundingParams& p);

/// Plain-loop back-projection.
PointCloud backproject_depth_serial(const DepthMap& depth, const Intrinsics& K,
                                    const Pose& pose, int stride);

}  // namespace bevkit::reference
