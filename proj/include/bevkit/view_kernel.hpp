#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "bevkit/geometry.hpp"

namespace bevkit {

/// Symmetric frame-affinity matrix with a temporal band: entries vanish
/// whenever |i - j| > bandwidth. Only the upper band is materialized, one
/// padded row of bandwidth+1 slots per frame.
struct BandedAffinity {
  int n = 0;
  int bandwidth = 0;
  std::vector<double> band;  // band[i * (bandwidth + 1) + d] = W(i, i + d)

  double at(int i, int j) const;

  /// Number of entries actually materialized (diagonal plus in-band uppers).
  std::size_t stored_entries() const;
};

/// Heat-diffusion viewpoint kernel exp(-tau * L); symmetric and numerically
/// positive semidefinite.
struct ViewKernel {
  int n = 0;
  double tau = 0.0;
  Eigen::MatrixXd matrix;
};

/// Affinity graph over a contiguous pose sequence, keeping edges only within
/// the temporal band. Frame ids must be 0..n-1 in order.
BandedAffinity build_banded_affinity(const std::vector<Pose>& poses,
                                     const GeometryParams& p, int bandwidth);

/// Symmetric normalized Laplacian I - D^{-1/2} W D^{-1/2}; well defined since
/// every degree is at least the unit diagonal. Eigenvalues lie in [0, 2].
Eigen::MatrixXd normalized_laplacian(const BandedAffinity& W);

/// Matrix exponential exp(-tau * L) via symmetric eigendecomposition, with
/// eigenvalues clamped to >= 0 before exponentiation. tau = 0 yields the
/// identity exactly. Entries below trunc_eps in magnitude are zeroed
/// afterwards and symmetry re-enforced (trunc_eps = 0 keeps it dense).
ViewKernel heat_kernel(const Eigen::MatrixXd& L, double tau, double trunc_eps = 0.0);

}  // namespace bevkit
