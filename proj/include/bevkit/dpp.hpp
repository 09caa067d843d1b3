#pragma once

#include <vector>

#include <Eigen/Core>

#include "bevkit/geometry.hpp"
#include "bevkit/semantic.hpp"
#include "bevkit/view_kernel.hpp"

namespace bevkit {

/// L-ensemble kernel diag(q) * K * diag(q) plus a diagonal ridge. PSD when K
/// is PSD and the weights are nonnegative.
struct LEnsemble {
  Eigen::MatrixXd matrix;
  double ridge = 0.0;
};

/// Outcome of fixed-size MAP selection. Indices are in selection order and
/// the objective equals the sum of the per-step log-det gains.
struct SelectionResult {
  std::vector<int> indices;
  std::vector<double> gains;
  double objective = 0.0;
  bool floor_filled = false;  // degenerate tail filled by smallest index
};

/// Conditional-variance floor below which greedy selection stops trusting
/// marginals and fills the remaining slots by index order. Filled slots
/// record log(kVarianceFloor) as their gain.
inline constexpr double kVarianceFloor = 1e-12;

LEnsemble build_l_ensemble(const ViewKernel& K, const QualityWeights& q, double ridge);

/// Greedy MAP for max log det(L_X) with |X| = k, using incremental Cholesky
/// rows so each step costs one rank-one update per candidate. Ties break
/// toward the smallest frame index. Candidate gains within a step are
/// evaluated in parallel; the loop over steps is sequential.
SelectionResult greedy_map(const LEnsemble& L, int k);

/// Exhaustive oracle: enumerates every size-k subset and returns the log-det
/// maximizer, ties resolved lexicographically. Guarded to n <= 20.
SelectionResult exact_map(const LEnsemble& L, int k);

/// Tunables of the end-to-end keyframe selection.
struct SelectionParams {
  GeometryParams geometry;
  int bandwidth = 24;
  double tau = 2.0;
  double temperature = 1.0;
  double alpha = 0.5;
  int k = 32;
  double ridge = 1e-9;
  double trunc_eps = 0.0;
};

/// Full pipeline: banded affinity -> normalized Laplacian -> heat kernel ->
/// score calibration -> quality weights -> L-ensemble -> greedy MAP.
/// Deterministic for fixed inputs.
SelectionResult select_keyframes(const std::vector<Pose>& poses,
                                 const SemanticScores& scores,
                                 const SelectionParams& params);

}  // namespace bevkit
