#pragma once

#include <vector>

#include "bevkit/scene.hpp"

namespace bevkit {

/// Scales and thresholds of pose-query retrieval: sigma_p in meters, beta
/// weighting the heading difference, tau_s the acceptance threshold, t_max
/// the per-episode tool-call cap.
struct GroundingParams {
  double sigma_p = 1.0;
  double beta = 2.0;
  double tau_s = 0.5;
  int t_max = 6;
};

struct FramePoseEntry {
  int frame_id = 0;
  BevPose pose;
};

/// Per-frame BEV poses stored at preprocessing time, plus the grid metadata
/// needed to convert cell coordinates back to meters.
struct FramePoseTable {
  std::vector<FramePoseEntry> entries;
  GridMeta grid;
};

/// Retrieval outcome: the best-scoring frame either way; hit iff the score
/// clears tau_s. Per-frame scores are retained only when requested.
struct QueryResult {
  bool hit = false;
  int frame_id = -1;
  double score = 0.0;
  std::vector<double> all_scores;
};

/// Similarity in (0, 1]: positions are converted to meters via the cell
/// size, the heading difference is wrapped to [-180, 180] degrees, and
/// s = exp(-(|dp|^2/sigma_p^2 + beta^2 * dr_rad^2) / 2).
double bev_similarity(const BevPose& query, const BevPose& frame,
                      const GroundingParams& p, const GridMeta& grid);

/// Scores the query against every stored frame and takes the argmax; ties
/// break toward the smaller frame id. The scan parallelizes with a
/// deterministic reduction.
QueryResult retrieve(const BevPose& query, const FramePoseTable& table,
                     const GroundingParams& p, bool keep_scores = false);

}  // namespace bevkit
