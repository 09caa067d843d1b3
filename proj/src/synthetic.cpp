#include "bevkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "bevkit/error.hpp"

namespace bevkit {

namespace {

// Camera rotation from a forward axis, keeping the image roughly level:
// columns of world-from-camera are [right, down, forward].
Eigen::Matrix3d look_rotation(const Eigen::Vector3d& forward) {
  const Eigen::Vector3d f = forward.normalized();
  Eigen::Vector3d down0(0.0, 0.0, -1.0);
  Eigen::Vector3d right = down0.cross(f);
  if (right.norm() < 1e-9) {
    right = Eigen::Vector3d::UnitX();
  } else {
    right.normalize();
  }
  const Eigen::Vector3d down = f.cross(right);
  Eigen::Matrix3d wc;
  wc.col(0) = right;
  wc.col(1) = down;
  wc.col(2) = f;
  return wc;
}

Pose make_pose(const Eigen::Vector3d& center, const Eigen::Vector3d& forward, int id) {
  const Eigen::Matrix3d wc = look_rotation(forward);
  const Eigen::Matrix3d R = wc.transpose();  // world -> camera
  return Pose(Eigen::Quaterniond(R), -R * center, id);
}

}  // namespace

Intrinsics SyntheticScene::intrinsics() const {
  Intrinsics K;
  K.width = spec.image_width;
  K.height = spec.image_height;
  K.fx = spec.focal;
  K.fy = spec.focal;
  K.cx = 0.5 * (spec.image_width - 1);
  K.cy = 0.5 * (spec.image_height - 1);
  return K;
}

SyntheticScene generate_room_scene(const RoomSpec& spec) {
  if (spec.frames < 1 || spec.cloud_points < 100) {
    throw InputError("generate_room_scene: too few frames or points");
  }
  SyntheticScene scene;
  scene.spec = spec;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, spec.noise);

  const double W = spec.width, D = spec.depth, H = spec.height;

  for (int f = 0; f < spec.furniture; ++f) {
    const double bw = 0.4 + 0.8 * unit(rng);
    const double bd = 0.4 + 0.8 * unit(rng);
    const double bh = 0.4 + 0.7 * unit(rng);
    const double x0 = 0.3 + unit(rng) * (W - bw - 0.6);
    const double y0 = 0.3 + unit(rng) * (D - bd - 0.6);
    scene.furniture.push_back({{x0, y0, 0.0}, {x0 + bw, y0 + bd, bh}});
  }

  // Point budget: dense floor, walls spread over the full height, sparse
  // ceiling so the top of the height distribution keeps a long tail.
  const int n_floor = static_cast<int>(spec.cloud_points * 0.55);
  const int n_walls = static_cast<int>(spec.cloud_points * 0.28);
  const int n_ceiling = static_cast<int>(spec.cloud_points * 0.01);
  const int n_furniture = spec.cloud_points - n_floor - n_walls - n_ceiling;

  auto& pts = scene.cloud.points;
  pts.reserve(spec.cloud_points);
  for (int i = 0; i < n_floor; ++i) {
    pts.emplace_back(unit(rng) * W, unit(rng) * D, gauss(rng));
  }
  for (int i = 0; i < n_walls; ++i) {
    const double z = unit(rng) * H;
    switch (static_cast<int>(unit(rng) * 4.0)) {
      case 0: pts.emplace_back(gauss(rng), unit(rng) * D, z); break;
      case 1: pts.emplace_back(W + gauss(rng), unit(rng) * D, z); break;
      case 2: pts.emplace_back(unit(rng) * W, gauss(rng), z); break;
      default: pts.emplace_back(unit(rng) * W, D + gauss(rng), z); break;
    }
  }
  for (int i = 0; i < n_ceiling; ++i) {
    pts.emplace_back(unit(rng) * W, unit(rng) * D, H + gauss(rng));
  }
  for (int i = 0; i < n_furniture; ++i) {
    const auto& box = scene.furniture[static_cast<std::size_t>(
        unit(rng) * scene.furniture.size())];
    const Eigen::Vector3d size = box.hi - box.lo;
    Eigen::Vector3d p = box.lo + Eigen::Vector3d(unit(rng) * size.x(),
                                                 unit(rng) * size.y(),
                                                 unit(rng) * size.z());
    // push to one of the five visible faces
    switch (static_cast<int>(unit(rng) * 5.0)) {
      case 0: p.z() = box.hi.z(); break;
      case 1: p.x() = box.lo.x(); break;
      case 2: p.x() = box.hi.x(); break;
      case 3: p.y() = box.lo.y(); break;
      default: p.y() = box.hi.y(); break;
    }
    pts.push_back(p + Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)));
  }

  // Circular camera walk, looking along the path with a slight downward tilt.
  const Eigen::Vector3d room_center(W / 2.0, D / 2.0, 0.0);
  const double radius = 0.3 * std::min(W, D);
  const double cam_height = 1.5;
  const double tilt = 15.0 * std::numbers::pi / 180.0;
  scene.trajectory.reserve(spec.frames);
  scene.true_headings.reserve(spec.frames);
  for (int i = 0; i < spec.frames; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / spec.frames;
    Eigen::Vector3d c = room_center +
                        Eigen::Vector3d(radius * std::cos(phi), radius * std::sin(phi),
                                        cam_height);
    c.x() += 0.02 * (unit(rng) - 0.5);
    c.y() += 0.02 * (unit(rng) - 0.5);
    const Eigen::Vector3d tangent(-std::sin(phi), std::cos(phi), 0.0);
    const Eigen::Vector3d forward =
        (tangent * std::cos(tilt) - Eigen::Vector3d::UnitZ() * std::sin(tilt)).normalized();
    scene.trajectory.push_back(make_pose(c, forward, i));
    scene.true_headings.push_back(direction_heading(tangent.head<2>()));
  }

  // Keyword relevance as smooth bumps over the frame axis.
  scene.scores.keywords = {"chair", "table", "lamp"};
  const int kw = static_cast<int>(scene.scores.keywords.size());
  std::vector<double> centers(kw), widths(kw);
  for (int k = 0; k < kw; ++k) {
    centers[k] = unit(rng) * spec.frames;
    widths[k] = spec.frames * (0.03 + 0.05 * unit(rng));
  }
  scene.scores.per_keyword.resize(spec.frames, std::vector<double>(kw));
  for (int i = 0; i < spec.frames; ++i) {
    for (int k = 0; k < kw; ++k) {
      const double d = (i - centers[k]) / widths[k];
      scene.scores.per_keyword[i][k] = std::exp(-0.5 * d * d);
    }
  }
  scene.scores.raw = aggregate_keyword_scores(scene.scores.per_keyword);
  return scene;
}

namespace {

// Smallest positive ray parameter leaving the interior of a box, or infinity.
double exit_param(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                  const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  double s = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 1e-12) {
      s = std::min(s, (hi[a] - origin[a]) / dir[a]);
    } else if (dir[a] < -1e-12) {
      s = std::min(s, (lo[a] - origin[a]) / dir[a]);
    }
  }
  return s;
}

// Slab test for a ray starting outside the box; returns entry parameter or
// infinity when the box is missed.
double entry_param(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                   const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  double near = 0.0;
  double far = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir[a]) < 1e-12) {
      if (origin[a] < lo[a] || origin[a] > hi[a]) {
        return std::numeric_limits<double>::infinity();
      }
      continue;
    }
    double t0 = (lo[a] - origin[a]) / dir[a];
    double t1 = (hi[a] - origin[a]) / dir[a];
    if (t0 > t1) std::swap(t0, t1);
    near = std::max(near, t0);
    far = std::min(far, t1);
  }
  if (near > far || near <= 0.0) return std::numeric_limits<double>::infinity();
  return near;
}

}  // namespace

DepthMap render_depth(const SyntheticScene& scene, int frame_index) {
  if (frame_index < 0 || frame_index >= static_cast<int>(scene.trajectory.size())) {
    throw InputError("render_depth: frame index out of range");
  }
  const Intrinsics K = scene.intrinsics();
  const Pose& pose = scene.trajectory[frame_index];
  const Eigen::Matrix3d wc = pose.rotation_matrix().transpose();
  const Eigen::Vector3d center = pose.camera_center();
  const Eigen::Vector3d room_lo(0.0, 0.0, 0.0);
  const Eigen::Vector3d room_hi(scene.spec.width, scene.spec.depth, scene.spec.height);

  DepthMap d;
  d.frame_id = frame_index;
  d.width = K.width;
  d.height = K.height;
  d.values.resize(static_cast<std::size_t>(K.width) * K.height);

#pragma omp parallel for schedule(static)
  for (int v = 0; v < K.height; ++v) {
    for (int u = 0; u < K.width; ++u) {
      const Eigen::Vector3d ray_cam((u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0);
      const Eigen::Vector3d dir = wc * ray_cam;  // parameter equals pinhole depth
      double s = exit_param(center, dir, room_lo, room_hi);
      for (const auto& box : scene.furniture) {
        s = std::min(s, entry_param(center, dir, box.lo, box.hi));
      }
      d.values[static_cast<std::size_t>(v) * K.width + u] =
          std::isfinite(s) ? static_cast<float>(s) : -1.0f;
    }
  }
  return d;
}

std::vector<Pose> random_trajectory(int n, std::uint64_t seed) {
  if (n < 1) {
    throw InputError("random_trajectory: n must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Pose> poses;
  poses.reserve(n);
  Eigen::Vector3d position(0.0, 0.0, 0.0);
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  for (int i = 0; i < n; ++i) {
    position += 0.4 * Eigen::Vector3d(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5);
    const Eigen::Vector3d axis =
        Eigen::Vector3d(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5).normalized();
    q = q * Eigen::Quaterniond(Eigen::AngleAxisd(0.3 * (unit(rng) - 0.5), axis));
    q.normalize();
    poses.emplace_back(q, position, i);
  }
  return poses;
}

std::vector<Pose> two_cluster_trajectory(int per_cluster, double separation,
                                         std::uint64_t seed) {
  if (per_cluster < 1) {
    throw InputError("two_cluster_trajectory: per_cluster must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Pose> poses;
  poses.reserve(2 * per_cluster);
  for (int i = 0; i < 2 * per_cluster; ++i) {
    const bool second = i >= per_cluster;
    Eigen::Vector3d position(second ? separation : 0.0, 0.0, 0.0);
    position += 0.6 * Eigen::Vector3d(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5);
    const Eigen::Vector3d axis =
        Eigen::Vector3d(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5).normalized();
    const Eigen::Quaterniond q(Eigen::AngleAxisd(0.4 * (unit(rng) - 0.5), axis));
    poses.emplace_back(q, position, i);
  }
  return poses;
}

}  // namespace bevkit
