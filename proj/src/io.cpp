#include "bevkit/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bevkit/error.hpp"

namespace bevkit {

namespace fs = std::filesystem;
using nlohmann::json;

SelectionParams Config::selection() const {
  SelectionParams p;
  p.geometry = geometry();
  p.bandwidth = bandwidth;
  p.tau = tau;
  p.temperature = temperature;
  p.alpha = alpha;
  p.k = k;
  p.ridge = ridge;
  p.trunc_eps = trunc_eps;
  return p;
}

void Config::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InputError(std::string("config: ") + what);
  };
  require(sigma_t > 0.0, "sigma_t must be > 0");
  require(beta >= 0.0, "beta must be >= 0");
  require(bandwidth >= 0, "bandwidth must be >= 0");
  require(tau >= 0.0, "tau must be >= 0");
  require(temperature > 0.0, "temperature must be > 0");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  require(k >= 1, "k must be >= 1");
  require(ridge >= 0.0, "ridge must be >= 0");
  require(trunc_eps >= 0.0, "trunc_eps must be >= 0");
  require(sigma_p > 0.0, "sigma_p must be > 0");
  require(tau_s > 0.0 && tau_s <= 1.0, "tau_s must lie in (0, 1]");
  require(theta_sim > 0.0, "theta_sim must be > 0");
  require(alpha_s > 0.0, "alpha_s must be > 0");
  require(t_max >= 1, "t_max must be >= 1");
  require(cell_size >= 0.0, "cell_size must be >= 0 (0 = auto)");
  require(stride >= 1, "stride must be >= 1");
}

json Config::to_json() const {
  return json{
      {"sigma_t", sigma_t},
      {"beta", beta},
      {"bandwidth", bandwidth},
      {"tau", tau},
      {"temperature", temperature},
      {"alpha", alpha},
      {"k", k},
      {"ridge", ridge},
      {"trunc_eps", trunc_eps},
      {"sigma_p", sigma_p},
      {"tau_s", tau_s},
      {"theta_sim", theta_sim},
      {"alpha_s", alpha_s},
      {"lambda_tool", lambda_tool},
      {"lambda_spatial", lambda_spatial},
      {"t_max", t_max},
      {"cell_size", cell_size},
      {"stride", stride},
  };
}

Config Config::from_json(const json& j) {
  if (!j.is_object()) {
    throw InputError("config: expected a JSON object");
  }
  Config c;
  bool theta_set = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "sigma_t") c.sigma_t = value.get<double>();
    else if (key == "beta") c.beta = value.get<double>();
    else if (key == "bandwidth") c.bandwidth = value.get<int>();
    else if (key == "tau") c.tau = value.get<double>();
    else if (key == "temperature") c.temperature = value.get<double>();
    else if (key == "alpha") c.alpha = value.get<double>();
    else if (key == "k") c.k = value.get<int>();
    else if (key == "ridge") c.ridge = value.get<double>();
    else if (key == "trunc_eps") c.trunc_eps = value.get<double>();
    else if (key == "sigma_p") c.sigma_p = value.get<double>();
    else if (key == "tau_s") c.tau_s = value.get<double>();
    else if (key == "theta_sim") { c.theta_sim = value.get<double>(); theta_set = true; }
    else if (key == "alpha_s") c.alpha_s = value.get<double>();
    else if (key == "lambda_tool") c.lambda_tool = value.get<double>();
    else if (key == "lambda_spatial") c.lambda_spatial = value.get<double>();
    else if (key == "t_max") c.t_max = value.get<int>();
    else if (key == "cell_size") c.cell_size = value.get<double>();
    else if (key == "stride") c.stride = value.get<int>();
    else throw InputError("config: unknown key '" + key + "'");
  }
  if (!theta_set) c.theta_sim = c.tau_s;
  c.validate();
  return c;
}

Config Config::load(const fs::path& path) {
  json j = json::parse(read_text(path), nullptr, false);
  if (j.is_discarded()) {
    throw InputError("config: failed to parse JSON at " + path.string());
  }
  return from_json(j);
}

// ---- low-level helpers ----

std::string fnv1a_hex(const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fnv1a_file_hex(const fs::path& path) {
  const std::string bytes = read_text(path);
  return fnv1a_hex(bytes.data(), bytes.size());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void atomic_write_bytes(const fs::path& path, const void* data, std::size_t len) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw InputError("cannot write " + tmp.string());
    }
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    if (!out) {
      throw InputError("short write to " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

void atomic_write_text(const fs::path& path, const std::string& text) {
  atomic_write_bytes(path, text.data(), text.size());
}

// ---- trajectories ----

std::vector<Pose> read_trajectory_jsonl(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<Pose> poses;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw InputError(path.string() + ":" + std::to_string(lineno) +
                       ": malformed trajectory record");
    }
    try {
      const auto t = j.at("t");
      const auto q = j.at("q");
      poses.emplace_back(
          Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                             q.at(2).get<double>(), q.at(3).get<double>()),
          Eigen::Vector3d(t.at(0).get<double>(), t.at(1).get<double>(),
                          t.at(2).get<double>()),
          j.at("frame_id").get<int>());
    } catch (const json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (poses.empty()) {
    throw InputError(path.string() + ": empty trajectory");
  }
  return poses;
}

void write_trajectory_jsonl(const fs::path& path, const std::vector<Pose>& poses) {
  std::string out;
  for (const auto& p : poses) {
    json j = {
        {"frame_id", p.frame_id},
        {"t", {p.translation.x(), p.translation.y(), p.translation.z()}},
        {"q", {p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z()}},
    };
    out += j.dump();
    out += '\n';
  }
  atomic_write_text(path, out);
}

// ---- scores ----

SemanticScores read_scores_json(const fs::path& path) {
  json j = json::parse(read_text(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw InputError(path.string() + ": malformed scores file");
  }
  SemanticScores s;
  if (j.contains("raw")) {
    s.raw = j["raw"].get<std::vector<double>>();
  }
  if (j.contains("keywords")) {
    s.keywords = j["keywords"].get<std::vector<std::string>>();
  }
  if (j.contains("per_keyword")) {
    s.per_keyword = j["per_keyword"].get<std::vector<std::vector<double>>>();
    if (s.raw.empty()) {
      s.raw = aggregate_keyword_scores(s.per_keyword);
    }
  }
  if (s.raw.empty()) {
    throw InputError(path.string() + ": scores file carries neither raw nor per_keyword");
  }
  for (double v : s.raw) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError(path.string() + ": raw scores must lie in [0, 1]");
    }
  }
  return s;
}

void write_scores_json(const fs::path& path, const SemanticScores& scores) {
  json j = json::object();
  if (!scores.per_keyword.empty()) {
    j["keywords"] = scores.keywords;
    j["per_keyword"] = scores.per_keyword;
  } else {
    j["raw"] = scores.raw;
  }
  atomic_write_text(path, j.dump() + "\n");
}

// ---- depth ----

Intrinsics read_intrinsics_json(const fs::path& path) {
  json j = json::parse(read_text(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw InputError(path.string() + ": malformed intrinsics file");
  }
  Intrinsics K;
  try {
    K.width = j.at("width").get<int>();
    K.height = j.at("height").get<int>();
    K.fx = j.at("fx").get<double>();
    K.fy = j.at("fy").get<double>();
    K.cx = j.at("cx").get<double>();
    K.cy = j.at("cy").get<double>();
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (K.fx <= 0.0 || K.fy <= 0.0 || K.width < 1 || K.height < 1) {
    throw InputError(path.string() + ": intrinsics out of range");
  }
  return K;
}

void write_intrinsics_json(const fs::path& path, const Intrinsics& K) {
  json j = {{"width", K.width}, {"height", K.height}, {"fx", K.fx},
            {"fy", K.fy},       {"cx", K.cx},         {"cy", K.cy}};
  atomic_write_text(path, j.dump() + "\n");
}

DepthMap read_depth_bin(const fs::path& path, const Intrinsics& K, int frame_id) {
  const std::string bytes = read_text(path);
  const std::size_t expect = static_cast<std::size_t>(K.width) * K.height * sizeof(float);
  if (bytes.size() != expect) {
    throw InputError(path.string() + ": depth size does not match intrinsics");
  }
  DepthMap d;
  d.frame_id = frame_id;
  d.width = K.width;
  d.height = K.height;
  d.values.resize(static_cast<std::size_t>(K.width) * K.height);
  std::memcpy(d.values.data(), bytes.data(), bytes.size());
  return d;
}

void write_depth_bin(const fs::path& path, const DepthMap& depth) {
  atomic_write_bytes(path, depth.values.data(), depth.values.size() * sizeof(float));
}

std::filesystem::path depth_file_name(int frame_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d.depth", frame_id);
  return buf;
}

std::pair<Intrinsics, std::vector<DepthMap>> read_depth_dir(const fs::path& dir) {
  const Intrinsics K = read_intrinsics_json(dir / "intrinsics.json");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".depth") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<DepthMap> maps;
  maps.reserve(files.size());
  for (const auto& f : files) {
    const std::string stem = f.stem().string();
    int frame_id = -1;
    try {
      frame_id = std::stoi(stem);
    } catch (const std::exception&) {
      throw InputError(f.string() + ": depth file name is not a frame id");
    }
    maps.push_back(read_depth_bin(f, K, frame_id));
  }
  return {K, std::move(maps)};
}

// ---- points ----

PointCloud read_points_bin(const fs::path& path) {
  const std::string bytes = read_text(path);
  if (bytes.size() % (3 * sizeof(float)) != 0) {
    throw InputError(path.string() + ": point file size is not a multiple of 12");
  }
  const std::size_t n = bytes.size() / (3 * sizeof(float));
  std::vector<float> raw(n * 3);
  std::memcpy(raw.data(), bytes.data(), bytes.size());
  PointCloud pc;
  pc.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    pc.points[i] = Eigen::Vector3d(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]);
    if (!pc.points[i].allFinite()) {
      throw InputError(path.string() + ": non-finite point at record " + std::to_string(i));
    }
  }
  return pc;
}

void write_points_bin(const fs::path& path, const PointCloud& pc) {
  std::vector<float> raw(pc.points.size() * 3);
  for (std::size_t i = 0; i < pc.points.size(); ++i) {
    raw[3 * i] = static_cast<float>(pc.points[i].x());
    raw[3 * i + 1] = static_cast<float>(pc.points[i].y());
    raw[3 * i + 2] = static_cast<float>(pc.points[i].z());
  }
  atomic_write_bytes(path, raw.data(), raw.size() * sizeof(float));
}

// ---- BEV grid ----

void write_bev_grid_bin(const fs::path& path, const BevGrid& grid) {
  const std::size_t plane = static_cast<std::size_t>(grid.meta.width) * grid.meta.height;
  std::vector<float> packed;
  packed.reserve(plane * 4);
  packed.insert(packed.end(), grid.occupancy.begin(), grid.occupancy.end());
  packed.insert(packed.end(), grid.min_z.begin(), grid.min_z.end());
  packed.insert(packed.end(), grid.max_z.begin(), grid.max_z.end());
  packed.insert(packed.end(), grid.mean_z.begin(), grid.mean_z.end());
  atomic_write_bytes(path, packed.data(), packed.size() * sizeof(float));
}

BevGrid read_bev_grid_bin(const fs::path& path, const GridMeta& meta) {
  const std::string bytes = read_text(path);
  const std::size_t plane = static_cast<std::size_t>(meta.width) * meta.height;
  if (bytes.size() != plane * 4 * sizeof(float)) {
    throw InputError(path.string() + ": grid size does not match metadata");
  }
  std::vector<float> packed(plane * 4);
  std::memcpy(packed.data(), bytes.data(), bytes.size());
  BevGrid g;
  g.meta = meta;
  g.occupancy.assign(packed.begin(), packed.begin() + plane);
  g.min_z.assign(packed.begin() + plane, packed.begin() + 2 * plane);
  g.max_z.assign(packed.begin() + 2 * plane, packed.begin() + 3 * plane);
  g.mean_z.assign(packed.begin() + 3 * plane, packed.end());
  return g;
}

// ---- bundle ----

namespace {

json grid_meta_json(const GridMeta& meta, const GroundTransform& ground, bool flipped,
                    const BundleWarnings& warnings, std::size_t frame_count,
                    const Config& config) {
  std::vector<double> rot(9);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) rot[3 * i + j] = ground.rotation(i, j);
  }
  return json{
      {"width", meta.width},
      {"height", meta.height},
      {"cell_size", meta.cell_size},
      {"origin", {meta.origin.x(), meta.origin.y()}},
      {"channels", {"occupancy", "min_z", "max_z", "mean_z"}},
      {"ground_rotation", rot},
      {"ground_translation",
       {ground.translation.x(), ground.translation.y(), ground.translation.z()}},
      {"flipped", flipped},
      {"tie_warning", warnings.tie_warning},
      {"thin_scene_warning", warnings.thin_scene_warning},
      {"frame_count", frame_count},
      {"config", config.to_json()},
  };
}

json frame_poses_json(const FramePoseTable& table, const Config& config) {
  json frames = json::array();
  for (const auto& e : table.entries) {
    frames.push_back(json{{"frame_id", e.frame_id},
                          {"x", e.pose.x},
                          {"y", e.pose.y},
                          {"r", e.pose.r},
                          {"degenerate_heading", e.pose.degenerate_heading}});
  }
  return json{{"frames", frames}, {"config", config.to_json()}};
}

}  // namespace

void write_bundle(const fs::path& dir, const Config& config,
                  const std::vector<Pose>& trajectory,
                  const std::optional<SemanticScores>& scores, const BevGrid& grid,
                  const GroundTransform& ground, bool flipped,
                  const BundleWarnings& warnings, const FramePoseTable& frame_poses) {
  fs::create_directories(dir);
  write_trajectory_jsonl(dir / "trajectory.jsonl", trajectory);
  if (scores) {
    write_scores_json(dir / "scores.json", *scores);
  }
  write_bev_grid_bin(dir / "bev_grid.bin", grid);
  atomic_write_text(dir / "bev_meta.json",
                    grid_meta_json(grid.meta, ground, flipped, warnings,
                                   trajectory.size(), config)
                            .dump(2) +
                        "\n");
  atomic_write_text(dir / "frame_poses.json",
                    frame_poses_json(frame_poses, config).dump(2) + "\n");

  json files = json::object();
  for (const char* name :
       {"trajectory.jsonl", "scores.json", "bev_grid.bin", "bev_meta.json",
        "frame_poses.json"}) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) continue;
    files[name] = json{{"bytes", fs::file_size(p)}, {"fnv1a64", fnv1a_file_hex(p)}};
  }
  json manifest = {
      {"files", files},
      {"frame_count", trajectory.size()},
      {"config", config.to_json()},
  };
  atomic_write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

SceneBundle load_bundle(const fs::path& dir, bool verify_hashes) {
  const fs::path manifest_path = dir / "manifest.json";
  json manifest = json::parse(read_text(manifest_path), nullptr, false);
  if (manifest.is_discarded()) {
    throw InputError(manifest_path.string() + ": malformed manifest");
  }
  if (verify_hashes) {
    for (const auto& [name, meta] : manifest.at("files").items()) {
      const fs::path p = dir / name;
      if (!fs::exists(p)) {
        throw InputError(manifest_path.string() + ": missing bundle file " + name);
      }
      if (fnv1a_file_hex(p) != meta.at("fnv1a64").get<std::string>()) {
        throw InputError(manifest_path.string() + ": hash mismatch for " + name);
      }
    }
  }

  SceneBundle b;
  b.dir = dir;
  b.config = Config::from_json(manifest.at("config"));
  b.trajectory = read_trajectory_jsonl(dir / "trajectory.jsonl");
  if (fs::exists(dir / "scores.json")) {
    b.scores = read_scores_json(dir / "scores.json");
  }

  json meta = json::parse(read_text(dir / "bev_meta.json"), nullptr, false);
  if (meta.is_discarded()) {
    throw InputError((dir / "bev_meta.json").string() + ": malformed metadata");
  }
  b.grid.width = meta.at("width").get<int>();
  b.grid.height = meta.at("height").get<int>();
  b.grid.cell_size = meta.at("cell_size").get<double>();
  b.grid.origin = Eigen::Vector2d(meta.at("origin").at(0).get<double>(),
                                  meta.at("origin").at(1).get<double>());
  const auto rot = meta.at("ground_rotation");
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) b.ground.rotation(i, j) = rot.at(3 * i + j).get<double>();
  }
  const auto tr = meta.at("ground_translation");
  b.ground.translation = Eigen::Vector3d(tr.at(0).get<double>(), tr.at(1).get<double>(),
                                         tr.at(2).get<double>());
  b.flipped = meta.at("flipped").get<bool>();

  json poses = json::parse(read_text(dir / "frame_poses.json"), nullptr, false);
  if (poses.is_discarded()) {
    throw InputError((dir / "frame_poses.json").string() + ": malformed pose table");
  }
  b.frame_poses.grid = b.grid;
  for (const auto& f : poses.at("frames")) {
    FramePoseEntry e;
    e.frame_id = f.at("frame_id").get<int>();
    e.pose.x = f.at("x").get<double>();
    e.pose.y = f.at("y").get<double>();
    e.pose.r = f.at("r").get<double>();
    e.pose.degenerate_heading = f.value("degenerate_heading", false);
    b.frame_poses.entries.push_back(e);
  }

  const std::size_t expect = manifest.at("frame_count").get<std::size_t>();
  if (b.trajectory.size() != expect || b.frame_poses.entries.size() != expect ||
      (b.scores && b.scores->raw.size() != expect)) {
    throw InputError(dir.string() + ": frame counts disagree across bundle files");
  }
  return b;
}

// ---- selection ----

void write_selection_json(const fs::path& path, const SelectionResult& r,
                          const Config& config) {
  json j = {
      {"indices", r.indices},
      {"gains", r.gains},
      {"objective", r.objective},
      {"floor_filled", r.floor_filled},
      {"config", config.to_json()},
  };
  atomic_write_text(path, j.dump(2) + "\n");
}

SelectionResult read_selection_json(const fs::path& path) {
  json j = json::parse(read_text(path), nullptr, false);
  if (j.is_discarded()) {
    throw InputError(path.string() + ": malformed selection file");
  }
  SelectionResult r;
  r.indices = j.at("indices").get<std::vector<int>>();
  r.gains = j.at("gains").get<std::vector<double>>();
  r.objective = j.at("objective").get<double>();
  r.floor_filled = j.value("floor_filled", false);
  return r;
}

// ---- episode logs ----

std::string answer_kind_name(AnswerKind kind) {
  return kind == AnswerKind::MultipleChoice ? "multiple-choice" : "numeric";
}

AnswerKind parse_answer_kind(const std::string& name) {
  if (name == "multiple-choice" || name == "mc") return AnswerKind::MultipleChoice;
  if (name == "numeric") return AnswerKind::Numeric;
  throw InputError("unknown answer kind: " + name);
}

nlohmann::json episode_record_json(const EpisodeRecord& rec, const Config& config) {
  json steps = json::array();
  for (const auto& s : rec.traj.steps) {
    json action;
    if (s.action.kind == Action::Kind::Query) {
      action = {{"type", "query"},
                {"camera", {s.action.query.x, s.action.query.y, s.action.query.r}},
                {"think", s.think},
                {"text", s.turn_text}};
    } else {
      action = {{"type", "stop"},
                {"answer", s.action.answer},
                {"think", s.think},
                {"text", s.turn_text}};
    }
    json result;
    json score;
    if (s.result) {
      result = {{"outcome", s.result->hit ? "hit" : "miss"},
                {"frame_id", s.result->frame_id},
                {"score", s.result->score}};
      score = s.result->score;
    }
    steps.push_back(json{{"action", action}, {"result", result}, {"score", score}});
  }

  json j = {
      {"episode_id", rec.episode_id},
      {"steps", steps},
      {"answer", rec.traj.final_answer ? json(*rec.traj.final_answer) : json()},
      {"gold", rec.traj.gold},
      {"kind", answer_kind_name(rec.traj.kind)},
      {"capped", rec.traj.capped},
      {"rewards",
       {{"acc", rec.rewards.acc},
        {"format", rec.rewards.format},
        {"tool", rec.rewards.tool},
        {"spatial", rec.rewards.spatial},
        {"total", rec.rewards.total}}},
      {"config", config.to_json()},
  };
  if (rec.advantage) {
    j["advantages"] = *rec.advantage;
  }
  return j;
}

void write_episode_log(const fs::path& path, const std::vector<EpisodeRecord>& records,
                       const Config& config) {
  std::string out;
  for (const auto& rec : records) {
    out += episode_record_json(rec, config).dump();
    out += '\n';
  }
  atomic_write_text(path, out);
}

std::vector<EpisodeRecord> read_episode_log(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<EpisodeRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw InputError(path.string() + ":" + std::to_string(lineno) +
                       ": malformed episode record");
    }
    EpisodeRecord rec;
    rec.episode_id = j.at("episode_id").get<int>();
    rec.traj.gold = j.at("gold").get<std::string>();
    rec.traj.kind = parse_answer_kind(j.at("kind").get<std::string>());
    rec.traj.capped = j.value("capped", false);
    if (!j.at("answer").is_null()) {
      rec.traj.final_answer = j.at("answer").get<std::string>();
    }
    for (const auto& s : j.at("steps")) {
      TrajectoryStep ts;
      const auto& action = s.at("action");
      if (action.at("type") == "query") {
        BevPose p;
        p.x = action.at("camera").at(0).get<double>();
        p.y = action.at("camera").at(1).get<double>();
        p.r = action.at("camera").at(2).get<double>();
        ts.action = Action::make_query(p);
      } else {
        ts.action = Action::make_stop(action.at("answer").get<std::string>());
      }
      ts.think = action.value("think", "");
      ts.turn_text = action.value("text", "");
      if (!s.at("result").is_null()) {
        QueryResult qr;
        qr.hit = s.at("result").at("outcome") == "hit";
        qr.frame_id = s.at("result").at("frame_id").get<int>();
        qr.score = s.at("result").at("score").get<double>();
        ts.result = qr;
        rec.traj.call_scores.push_back(qr.score);
      }
      rec.traj.steps.push_back(std::move(ts));
    }
    const auto& rw = j.at("rewards");
    rec.rewards.acc = rw.at("acc").get<double>();
    rec.rewards.format = rw.at("format").get<double>();
    rec.rewards.tool = rw.at("tool").get<double>();
    rec.rewards.spatial = rw.at("spatial").get<double>();
    rec.rewards.total = rw.at("total").get<double>();
    if (j.contains("advantages")) {
      rec.advantage = j.at("advantages").get<double>();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace bevkit
