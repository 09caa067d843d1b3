#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bevkit/error.hpp"
#include "bevkit/io.hpp"

namespace bevkit {

/// Command-line misuse (bad flag payloads); mapped to exit code 2.
struct UsageError : InputError {
  using InputError::InputError;
};

struct PreprocessArgs {
  std::filesystem::path trajectory;
  std::filesystem::path depth_dir;  // optional
  std::filesystem::path points;     // optional
  std::filesystem::path scores;     // optional
  std::filesystem::path out_dir;
};

/// Builds the ground-aligned bundle (grid, ground transform, frame pose
/// table, manifest) from a trajectory plus either a depth directory or a raw
/// point file. An empty or absent depth directory falls back to the point
/// file.
SceneBundle cmd_preprocess(const PreprocessArgs& args, const Config& config);

struct SelectArgs {
  std::filesystem::path bundle;
  std::filesystem::path scores;  // optional; bundle scores used when absent
  std::filesystem::path out_file;
};

SelectionResult cmd_select(const SelectArgs& args, const Config& config);

struct QueryArgs {
  std::filesystem::path bundle;
  std::string camera_json;  // "[x, y, r]"
};

/// Prints the query outcome as JSON on the stream; the caller maps hit/miss
/// to exit codes.
QueryResult cmd_query(const QueryArgs& args, const Config& config, std::ostream& out);

struct EpisodeArgs {
  std::filesystem::path bundle;
  std::string policy = "oracle";
  int episodes = 1;
  std::uint64_t seed = 0;
  std::string gold = "A";
  std::string kind = "multiple-choice";
  int gold_frame = 0;
  std::string answer = "A";  // scripted no-tool answer
  std::filesystem::path out_file;
};

std::vector<EpisodeRecord> cmd_episode(const EpisodeArgs& args, const Config& config,
                                       std::ostream& out);

struct RewardArgs {
  std::filesystem::path log;
  std::filesystem::path out_file;
};

/// Re-scores an existing trajectory log under the given config.
std::vector<EpisodeRecord> cmd_reward(const RewardArgs& args, const Config& config,
                                      std::ostream& out);

struct SynthArgs {
  std::filesystem::path out_dir;
  int frames = 500;
  int points = 200000;
  int furniture = 3;
  std::uint64_t seed = 0;
  std::string mode = "points";  // points | depth
};

/// Writes a self-contained synthetic scene (trajectory, scores, geometry,
/// ground truth) for demos and end-to-end tests.
void cmd_synth(const SynthArgs& args);

}  // namespace bevkit
