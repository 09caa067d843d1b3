#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bevkit/dpp.hpp"
#include "bevkit/episode.hpp"
#include "bevkit/geometry.hpp"
#include "bevkit/grounding.hpp"
#include "bevkit/scene.hpp"
#include "bevkit/semantic.hpp"

namespace bevkit {

/// Every tunable of the pipeline with its default. Loading rejects unknown
/// keys and out-of-range values; theta_sim follows tau_s unless a file sets
/// it explicitly.
struct Config {
  // keyframe selection
  double sigma_t = 1.0;      // translation scale, meters
  double beta = 2.0;         // rotation weight
  int bandwidth = 24;        // temporal band, frames
  double tau = 2.0;          // heat diffusion scale
  double temperature = 1.0;  // semantic softmax temperature
  double alpha = 0.5;        // quality mixing weight
  int k = 32;                // selected subset size
  double ridge = 1e-9;
  double trunc_eps = 0.0;
  // grounding and episodes
  double sigma_p = 1.0;  // BEV spatial scale, meters
  double tau_s = 0.5;    // retrieval acceptance threshold
  double theta_sim = 0.5;
  double alpha_s = 0.5;
  double lambda_tool = 1.0;
  double lambda_spatial = 1.0;
  int t_max = 6;
  // preprocessing
  double cell_size = 0.0;  // meters per cell; 0 selects per scene (<= 256 cells)
  int stride = 8;          // back-projection pixel stride

  GeometryParams geometry() const { return {sigma_t, beta}; }
  SelectionParams selection() const;
  GroundingParams grounding() const { return {sigma_p, beta, tau_s, t_max}; }
  RewardConfig rewards() const { return {lambda_tool, lambda_spatial, alpha_s, theta_sim}; }

  void validate() const;
  nlohmann::json to_json() const;
  static Config from_json(const nlohmann::json& j);
  static Config load(const std::filesystem::path& path);
};

// ---- low-level helpers ----

std::string fnv1a_hex(const void* data, std::size_t len);
std::string fnv1a_file_hex(const std::filesystem::path& path);

/// Write-then-rename so readers never observe a partial file.
void atomic_write_text(const std::filesystem::path& path, const std::string& text);
void atomic_write_bytes(const std::filesystem::path& path, const void* data,
                        std::size_t len);
std::string read_text(const std::filesystem::path& path);

// ---- pose trajectories: one {"frame_id", "t":[x,y,z], "q":[w,x,y,z]} per line ----

std::vector<Pose> read_trajectory_jsonl(const std::filesystem::path& path);
void write_trajectory_jsonl(const std::filesystem::path& path,
                            const std::vector<Pose>& poses);

// ---- semantic scores: {"raw":[...]} or {"keywords":[...], "per_keyword":[[...]]} ----

SemanticScores read_scores_json(const std::filesystem::path& path);
void write_scores_json(const std::filesystem::path& path, const SemanticScores& scores);

// ---- depth: raw little-endian float32 rows plus a shared JSON sidecar ----

Intrinsics read_intrinsics_json(const std::filesystem::path& path);
void write_intrinsics_json(const std::filesystem::path& path, const Intrinsics& K);
DepthMap read_depth_bin(const std::filesystem::path& path, const Intrinsics& K,
                        int frame_id);
void write_depth_bin(const std::filesystem::path& path, const DepthMap& depth);

/// Loads <frame>.depth files named by zero-padded frame id, with one
/// intrinsics.json sidecar for the whole directory.
std::pair<Intrinsics, std::vector<DepthMap>> read_depth_dir(
    const std::filesystem::path& dir);
std::filesystem::path depth_file_name(int frame_id);

// ---- raw point clouds: packed little-endian float32 xyz triples ----

PointCloud read_points_bin(const std::filesystem::path& path);
void write_points_bin(const std::filesystem::path& path, const PointCloud& pc);

// ---- BEV grid: 4 planes (occupancy, min_z, max_z, mean_z) of float32 ----

void write_bev_grid_bin(const std::filesystem::path& path, const BevGrid& grid);
BevGrid read_bev_grid_bin(const std::filesystem::path& path, const GridMeta& meta);

// ---- scene bundle: one directory with a hash manifest ----

struct SceneBundle {
  std::filesystem::path dir;
  Config config;
  std::vector<Pose> trajectory;
  std::optional<SemanticScores> scores;
  GridMeta grid;
  GroundTransform ground;
  bool flipped = false;
  FramePoseTable frame_poses;
};

struct BundleWarnings {
  bool tie_warning = false;
  bool thin_scene_warning = false;
};

void write_bundle(const std::filesystem::path& dir, const Config& config,
                  const std::vector<Pose>& trajectory,
                  const std::optional<SemanticScores>& scores, const BevGrid& grid,
                  const GroundTransform& ground, bool flipped,
                  const BundleWarnings& warnings, const FramePoseTable& frame_poses);

SceneBundle load_bundle(const std::filesystem::path& dir, bool verify_hashes = true);

// ---- selection result ----

void write_selection_json(const std::filesystem::path& path, const SelectionResult& r,
                          const Config& config);
SelectionResult read_selection_json(const std::filesystem::path& path);

// ---- episode logs: one JSON object per line ----

struct EpisodeRecord {
  int episode_id = 0;
  Trajectory traj;
  RewardBreakdown rewards;
  std::optional<double> advantage;
};

nlohmann::json episode_record_json(const EpisodeRecord& rec, const Config& config);
void write_episode_log(const std::filesystem::path& path,
                       const std::vector<EpisodeRecord>& records, const Config& config);
std::vector<EpisodeRecord> read_episode_log(const std::filesystem::path& path);

std::string answer_kind_name(AnswerKind kind);
AnswerKind parse_answer_kind(const std::string& name);

}  // namespace bevkit
