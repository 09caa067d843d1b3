#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "bevkit/dpp.hpp"
#include "bevkit/geometry.hpp"

namespace testutil {

/// Unique scratch directory, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("bevkit_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Eigen::Quaterniond axis_angle(const Eigen::Vector3d& axis, double radians) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(radians, axis.normalized()));
}

inline Eigen::Quaterniond random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q;
}

inline Eigen::Vector3d random_vec3(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

/// Random PSD matrix A^T A / n with a small diagonal lift.
inline Eigen::MatrixXd random_psd(int n, std::mt19937_64& rng, double lift = 1e-6) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = g(rng);
  }
  Eigen::MatrixXd M = A.transpose() * A / n;
  M.diagonal().array() += lift;
  return 0.5 * (M + M.transpose());
}

inline bevkit::LEnsemble as_ensemble(const Eigen::MatrixXd& m, double ridge = 0.0) {
  bevkit::LEnsemble L;
  L.matrix = m;
  L.ridge = ridge;
  L.matrix.diagonal().array() += ridge;
  return L;
}

inline std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace testutil
