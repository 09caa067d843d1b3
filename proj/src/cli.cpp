#include "bevkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "bevkit/policies.hpp"
#include "bevkit/synthetic.hpp"

namespace bevkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_contiguous(const std::vector<Pose>& poses, const std::string& origin) {
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (poses[i].frame_id != static_cast<int>(i)) {
      throw InputError(origin + ": frame ids must be contiguous 0..n-1 in order");
    }
  }
}

bool has_depth_files(const fs::path& dir) {
  if (dir.empty() || !fs::is_directory(dir)) return false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".depth") return true;
  }
  return false;
}

}  // namespace

SceneBundle cmd_preprocess(const PreprocessArgs& args, const Config& config) {
  config.validate();
  const std::vector<Pose> poses = read_trajectory_jsonl(args.trajectory);
  require_contiguous(poses, args.trajectory.string());
  const int n = static_cast<int>(poses.size());

  std::optional<SemanticScores> scores;
  if (!args.scores.empty()) {
    scores = read_scores_json(args.scores);
    if (static_cast<int>(scores->raw.size()) != n) {
      throw InputError(args.scores.string() + ": score count " +
                       std::to_string(scores->raw.size()) + " does not match " +
                       std::to_string(n) + " frames");
    }
  }

  PointCloud cloud;
  if (has_depth_files(args.depth_dir)) {
    auto [intrinsics, maps] = read_depth_dir(args.depth_dir);
    if (static_cast<int>(maps.size()) != n) {
      throw InputError(args.depth_dir.string() + ": " + std::to_string(maps.size()) +
                       " depth maps for " + std::to_string(n) + " trajectory frames");
    }
    for (int i = 0; i < n; ++i) {
      if (maps[i].frame_id != i) {
        throw InputError(args.depth_dir.string() + ": depth frame ids not contiguous");
      }
      PointCloud part = backproject_depth(maps[i], intrinsics, poses[i], config.stride);
      cloud.points.insert(cloud.points.end(), part.points.begin(), part.points.end());
    }
  } else if (!args.points.empty()) {
    cloud = read_points_bin(args.points);
  } else {
    throw InputError("preprocess: need either a depth directory or a point file");
  }

  const ObbFrame obb = fit_obb(cloud);
  const AlignResult aligned = align_to_ground(cloud, obb);
  const double cell =
      config.cell_size > 0.0 ? config.cell_size : auto_cell_size(aligned.aligned);
  const BevGrid grid = rasterize_bev(aligned.aligned, cell);

  FramePoseTable table;
  table.grid = grid.meta;
  table.entries.reserve(poses.size());
  for (const auto& pose : poses) {
    table.entries.push_back(
        {pose.frame_id, camera_to_bev_pose(pose, aligned.transform, grid.meta)});
  }

  BundleWarnings warnings;
  warnings.tie_warning = aligned.tie_warning;
  warnings.thin_scene_warning = aligned.thin_scene_warning;
  write_bundle(args.out_dir, config, poses, scores, grid, aligned.transform,
               aligned.flipped, warnings, table);
  return load_bundle(args.out_dir);
}

SelectionResult cmd_select(const SelectArgs& args, const Config& config) {
  config.validate();
  const SceneBundle bundle = load_bundle(args.bundle);

  SemanticScores scores;
  if (!args.scores.empty()) {
    scores = read_scores_json(args.scores);
  } else if (bundle.scores) {
    scores = *bundle.scores;
  } else {
    throw InputError("select: no scores file given and the bundle carries none");
  }
  if (scores.raw.size() != bundle.trajectory.size()) {
    throw InputError("select: score count does not match bundle frame count");
  }

  const SelectionResult result =
      select_keyframes(bundle.trajectory, scores, config.selection());
  write_selection_json(args.out_file, result, config);
  return result;
}

QueryResult cmd_query(const QueryArgs& args, const Config& config, std::ostream& out) {
  config.validate();
  json camera = json::parse(args.camera_json, nullptr, false);
  if (camera.is_discarded() || !camera.is_array() || camera.size() != 3) {
    throw UsageError("query: camera must be a JSON array [x, y, r]");
  }
  for (const auto& v : camera) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      throw UsageError("query: camera components must be finite numbers");
    }
  }

  const SceneBundle bundle = load_bundle(args.bundle);
  BevPose query;
  query.x = camera.at(0).get<double>();
  query.y = camera.at(1).get<double>();
  query.r = std::fmod(camera.at(2).get<double>(), 360.0);
  if (query.r < 0.0) query.r += 360.0;

  const QueryResult result = retrieve(query, bundle.frame_poses, config.grounding());
  json j = {
      {"outcome", result.hit ? "hit" : "miss"},
      {"frame_id", result.frame_id},
      {"score", result.score},
      {"config", config.to_json()},
  };
  out << j.dump() << "\n";
  return result;
}

namespace {

json reward_aggregate(const std::vector<EpisodeRecord>& records, const Config& config) {
  double acc = 0.0, format = 0.0, tool = 0.0, spatial = 0.0, total = 0.0;
  for (const auto& r : records) {
    acc += r.rewards.acc;
    format += r.rewards.format;
    tool += r.rewards.tool;
    spatial += r.rewards.spatial;
    total += r.rewards.total;
  }
  const double n = records.empty() ? 1.0 : static_cast<double>(records.size());
  return json{
      {"episodes", records.size()},
      {"mean", {{"acc", acc / n}, {"format", format / n}, {"tool", tool / n},
                {"spatial", spatial / n}, {"total", total / n}}},
      {"config", config.to_json()},
  };
}

void attach_advantages(std::vector<EpisodeRecord>& records) {
  if (records.size() < 2) return;
  std::vector<double> totals(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) totals[i] = records[i].rewards.total;
  const std::vector<double> adv = group_advantages(totals);
  for (std::size_t i = 0; i < records.size(); ++i) records[i].advantage = adv[i];
}

}  // namespace

std::vector<EpisodeRecord> cmd_episode(const EpisodeArgs& args, const Config& config,
                                       std::ostream& out) {
  config.validate();
  if (args.episodes < 1) {
    throw UsageError("episode: need at least one episode");
  }
  const PolicyKind policy = [&] {
    try {
      return parse_policy(args.policy);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  }();
  const SceneBundle bundle = load_bundle(args.bundle);

  EpisodeTask task;
  task.gold = args.gold;
  task.kind = parse_answer_kind(args.kind);
  task.gold_frame = args.gold_frame;
  task.scripted_answer = args.answer;

  const GroundingParams grounding = config.grounding();
  const RewardConfig rewards = config.rewards();

  std::vector<EpisodeRecord> records;
  records.reserve(args.episodes);
  for (int i = 0; i < args.episodes; ++i) {
    EpisodeRecord rec;
    rec.episode_id = i;
    rec.traj = run_episode(policy, task, bundle.frame_poses, grounding, args.seed + i);
    rec.rewards = total_reward(rec.traj, rewards);
    records.push_back(std::move(rec));
  }
  attach_advantages(records);

  write_episode_log(args.out_file, records, config);
  out << reward_aggregate(records, config).dump() << "\n";
  return records;
}

std::vector<EpisodeRecord> cmd_reward(const RewardArgs& args, const Config& config,
                                      std::ostream& out) {
  config.validate();
  std::vector<EpisodeRecord> records = read_episode_log(args.log);
  const RewardConfig rewards = config.rewards();
  for (auto& rec : records) {
    rec.rewards = total_reward(rec.traj, rewards);
    rec.advantage.reset();
  }
  attach_advantages(records);
  write_episode_log(args.out_file, records, config);
  out << reward_aggregate(records, config).dump() << "\n";
  return records;
}

void cmd_synth(const SynthArgs& args) {
  if (args.mode != "points" && args.mode != "depth") {
    throw UsageError("synth: mode must be points or depth");
  }
  RoomSpec spec;
  spec.frames = args.frames;
  spec.cloud_points = args.points;
  spec.furniture = args.furniture;
  spec.seed = args.seed;
  const SyntheticScene scene = generate_room_scene(spec);

  fs::create_directories(args.out_dir);
  write_trajectory_jsonl(args.out_dir / "trajectory.jsonl", scene.trajectory);
  write_scores_json(args.out_dir / "scores.json", scene.scores);

  if (args.mode == "points") {
    write_points_bin(args.out_dir / "points.bin", scene.cloud);
  } else {
    const fs::path depth_dir = args.out_dir / "depths";
    fs::create_directories(depth_dir);
    write_intrinsics_json(depth_dir / "intrinsics.json", scene.intrinsics());
    for (int i = 0; i < spec.frames; ++i) {
      write_depth_bin(depth_dir / depth_file_name(i), render_depth(scene, i));
    }
  }

  json truth = {
      {"room", {{"width", spec.width}, {"depth", spec.depth}, {"height", spec.height}}},
      {"seed", spec.seed},
      {"frames", spec.frames},
      {"true_headings", scene.true_headings},
  };
  atomic_write_text(args.out_dir / "truth.json", truth.dump(2) + "\n");
}

}  // namespace bevkit
