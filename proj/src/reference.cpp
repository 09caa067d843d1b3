#include "bevkit/reference.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "bevkit/error.hpp"

namespace bevkit::reference {

Eigen::MatrixXd banded_affinity_dense(const std::vector<Pose>& poses,
                                      const GeometryParams& p, int bandwidth) {
  const int n = static_cast<int>(poses.size());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(i - j) <= bandwidth) {
        W(i, j) = pose_affinity(pose_distance_sq(poses[i], poses[j], p));
      }
    }
  }
  return W;
}

Eigen::MatrixXd heat_kernel_dense(const Eigen::MatrixXd& L, double tau) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& V = eig.eigenvectors();
  Eigen::MatrixXd K = V * (-tau * lambda.array()).exp().matrix().asDiagonal() * V.transpose();
  return 0.5 * (K + K.transpose());
}

namespace {

double logdet_of(const Eigen::MatrixXd& L, const std::vector<int>& subset) {
  const int m = static_cast<int>(subset.size());
  Eigen::MatrixXd sub(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) sub(a, b) = L(subset[a], subset[b]);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(sub);
  double acc = 0.0;
  for (int a = 0; a < m; ++a) {
    const double d = ldlt.vectorD()[a];
    if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
    acc += std::log(d);
  }
  return acc;
}

}  // namespace

SelectionResult greedy_map_naive(const LEnsemble& L, int k) {
  const int n = static_cast<int>(L.matrix.rows());
  if (k < 1 || k > n) {
    throw InputError("greedy_map_naive: k must satisfy 1 <= k <= n");
  }

  SelectionResult r;
  std::vector<int> chosen;
  std::vector<char> selected(n, 0);
  double current = 0.0;
  for (int t = 0; t < k; ++t) {
    int best = -1;
    double best_logdet = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (selected[i]) continue;
      std::vector<int> cand = chosen;
      cand.push_back(i);
      const double v = logdet_of(L.matrix, cand);
      if (v > best_logdet) {
        best_logdet = v;
        best = i;
      }
    }
    const double variance = std::exp(best_logdet - current);
    if (best < 0 || !(variance >= kVarianceFloor)) {
      r.floor_filled = true;
      for (int i = 0; i < n && static_cast<int>(r.indices.size()) < k; ++i) {
        if (!selected[i]) {
          selected[i] = 1;
          r.indices.push_back(i);
          r.gains.push_back(std::log(kVarianceFloor));
        }
      }
      break;
    }
    selected[best] = 1;
    chosen.push_back(best);
    r.indices.push_back(best);
    r.gains.push_back(best_logdet - current);
    current = best_logdet;
  }
  r.objective = 0.0;
  for (double g : r.gains) r.objective += g;
  return r;
}

QueryResult retrieve_scan(const BevPose& query, const FramePoseTable& table,
                          const GroundingParams& p) {
  if (table.entries.empty()) {
    throw InputError("retrieve_scan: empty frame pose table");
  }
  QueryResult best;
  best.score = -1.0;
  for (const auto& e : table.entries) {
    // independent scorer: hypot-based distance, explicit angle wrap
    const double dx = (query.x - e.pose.x) * table.grid.cell_size;
    const double dy = (query.y - e.pose.y) * table.grid.cell_size;
    const double dist = std::hypot(dx, dy);
    double ddeg = query.r - e.pose.r;
    while (ddeg > 180.0) ddeg -= 360.0;
    while (ddeg < -180.0) ddeg += 360.0;
    const double drad = ddeg * std::numbers::pi / 180.0;
    const double s = std::exp(
        -0.5 * (dist * dist / (p.sigma_p * p.sigma_p) + p.beta * p.beta * drad * drad));
    if (s > best.score || (s == best.score && e.frame_id < best.frame_id)) {
      best.score = s;
      best.frame_id = e.frame_id;
    }
  }
  best.hit = best.score >= p.tau_s;
  return best;
}

PointCloud backproject_depth_serial(const DepthMap& depth, const Intrinsics& K,
                                    const Pose& pose, int stride) {
  if (stride < 1) {
    throw InputError("backproject_depth_serial: stride must be >= 1");
  }
  const Eigen::Matrix3d R_t = pose.rotation_matrix().transpose();
  PointCloud pc;
  for (int v = 0; v < depth.height; v += stride) {
    for (int u = 0; u < depth.width; u += stride) {
      const double d = depth.at(u, v);
      if (!(d > 0.0) || !std::isfinite(d)) continue;
      const Eigen::Vector3d ray((u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0);
      pc.points.push_back(R_t * (d * ray - pose.translation));
    }
  }
  return pc;
}

}  // namespace bevkit::reference
