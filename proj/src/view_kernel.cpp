#include "bevkit/view_kernel.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "bevkit/error.hpp"

namespace bevkit {

double BandedAffinity::at(int i, int j) const {
  if (i > j) std::swap(i, j);
  const int d = j - i;
  if (d > bandwidth) return 0.0;
  return band[static_cast<std::size_t>(i) * (bandwidth + 1) + d];
}

std::size_t BandedAffinity::stored_entries() const {
  std::size_t count = 0;
  for (int i = 0; i < n; ++i) {
    count += static_cast<std::size_t>(std::min(bandwidth, n - 1 - i)) + 1;
  }
  return count;
}

BandedAffinity build_banded_affinity(const std::vector<Pose>& poses,
                                     const GeometryParams& p, int bandwidth) {
  if (poses.empty()) {
    throw InputError("banded affinity: empty pose sequence");
  }
  if (bandwidth < 0) {
    throw InputError("banded affinity: bandwidth must be >= 0");
  }
  const int n = static_cast<int>(poses.size());
  for (int i = 0; i < n; ++i) {
    if (poses[i].frame_id != i) {
      throw InputError("banded affinity: frame ids must be contiguous 0..n-1 in order");
    }
  }

  BandedAffinity W;
  W.n = n;
  W.bandwidth = bandwidth;
  W.band.assign(static_cast<std::size_t>(n) * (bandwidth + 1), 0.0);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * (bandwidth + 1);
    W.band[row] = 1.0;  // d_ii = 0
    const int jmax = std::min(n - 1, i + bandwidth);
    for (int j = i + 1; j <= jmax; ++j) {
      W.band[row + (j - i)] = pose_affinity(pose_distance_sq(poses[i], poses[j], p));
    }
  }
  return W;
}

Eigen::MatrixXd normalized_laplacian(const BandedAffinity& W) {
  const int n = W.n;
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const int jmax = std::min(n - 1, i + W.bandwidth);
    for (int j = std::max(0, i - W.bandwidth); j <= jmax; ++j) {
      degree[i] += W.at(i, j);
    }
  }

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    L(i, i) = 1.0 - W.at(i, i) / degree[i];
    const int jmax = std::min(n - 1, i + W.bandwidth);
    for (int j = i + 1; j <= jmax; ++j) {
      const double v = -W.at(i, j) / std::sqrt(degree[i] * degree[j]);
      L(i, j) = v;
      L(j, i) = v;
    }
  }
  return L;
}

ViewKernel heat_kernel(const Eigen::MatrixXd& L, double tau, double trunc_eps) {
  if (L.rows() != L.cols()) {
    throw InputError("heat kernel: matrix must be square");
  }
  if (tau < 0.0 || !std::isfinite(tau)) {
    throw InputError("heat kernel: tau must be finite and >= 0");
  }
  if (!L.allFinite()) {
    throw NumericError("heat kernel: non-finite Laplacian");
  }
  const int n = static_cast<int>(L.rows());

  ViewKernel K;
  K.n = n;
  K.tau = tau;
  if (tau == 0.0) {
    K.matrix = Eigen::MatrixXd::Identity(n, n);
    return K;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  if (eig.info() != Eigen::Success) {
    throw NumericError("heat kernel: eigendecomposition failed");
  }

  // K = B B^T with B = V diag(exp(-tau*lambda/2)); clamping tiny negative
  // eigenvalues keeps the result positive semidefinite.
  Eigen::MatrixXd B = eig.eigenvectors();
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  for (int c = 0; c < n; ++c) {
    B.col(c) *= std::exp(-0.5 * tau * std::max(lambda[c], 0.0));
  }

  K.matrix.resize(n, n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double acc = 0.0;
      for (int c = 0; c < n; ++c) acc += B(i, c) * B(j, c);
      K.matrix(i, j) = acc;
      K.matrix(j, i) = acc;
    }
  }

  if (trunc_eps > 0.0) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        if (std::abs(K.matrix(i, j)) < trunc_eps) {
          K.matrix(i, j) = 0.0;
          K.matrix(j, i) = 0.0;
        }
      }
    }
  }
  return K;
}

}  // namespace bevkit
