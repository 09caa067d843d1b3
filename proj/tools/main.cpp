#include <cstdint>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "bevkit/cli.hpp"
#include "bevkit/error.hpp"

using namespace bevkit;

int main(int argc, char** argv) {
  CLI::App app{"ground-aligned scene preprocessing, diversity-aware keyframe "
               "selection, BEV pose queries, and episode reward scoring"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "JSON config file (defaults when absent)");
  app.add_option("--seed", seed, "seed for randomized policies");
  app.add_option("--out", out_dir, "output directory");

  PreprocessArgs pre;
  auto* cmd_pre = app.add_subcommand("preprocess", "build a ground-aligned scene bundle");
  cmd_pre->add_option("--trajectory", pre.trajectory, "pose trajectory (JSONL)")
      ->required();
  cmd_pre->add_option("--depths", pre.depth_dir, "directory of .depth files + intrinsics.json");
  cmd_pre->add_option("--points", pre.points, "raw float32 xyz point file");
  cmd_pre->add_option("--scores", pre.scores, "semantic scores to copy into the bundle");

  SelectArgs sel;
  auto* cmd_sel = app.add_subcommand("select", "select k diverse, relevant keyframes");
  cmd_sel->add_option("--bundle", sel.bundle, "scene bundle directory")->required();
  cmd_sel->add_option("--scores", sel.scores, "semantic scores (falls back to bundle)");

  QueryArgs qry;
  auto* cmd_qry = app.add_subcommand("query", "retrieve the frame nearest a BEV pose");
  cmd_qry->add_option("--bundle", qry.bundle, "scene bundle directory")->required();
  cmd_qry->add_option("--camera", qry.camera_json, "query pose as JSON [x, y, r]")
      ->required();

  EpisodeArgs epi;
  auto* cmd_epi = app.add_subcommand("episode", "run scripted verification episodes");
  cmd_epi->add_option("--bundle", epi.bundle, "scene bundle directory")->required();
  cmd_epi->add_option("--policy", epi.policy, "oracle | random | no-tool");
  cmd_epi->add_option("--episodes", epi.episodes, "episode count");
  cmd_epi->add_option("--gold", epi.gold, "gold answer");
  cmd_epi->add_option("--kind", epi.kind, "multiple-choice | numeric");
  cmd_epi->add_option("--gold-frame", epi.gold_frame, "frame the oracle queries");
  cmd_epi->add_option("--answer", epi.answer, "scripted no-tool answer");

  RewardArgs rew;
  auto* cmd_rew = app.add_subcommand("reward", "re-score an existing trajectory log");
  cmd_rew->add_option("--log", rew.log, "episode log (JSONL)")->required();

  SynthArgs syn;
  auto* cmd_syn = app.add_subcommand("synth", "generate a synthetic room scene");
  cmd_syn->add_option("--frames", syn.frames, "camera frames");
  cmd_syn->add_option("--points", syn.points, "cloud points");
  cmd_syn->add_option("--furniture", syn.furniture, "furniture boxes");
  cmd_syn->add_option("--mode", syn.mode, "points | depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Config config =
        config_path.empty() ? Config{} : Config::load(config_path);
    if (cmd_pre->parsed()) {
      pre.out_dir = out_dir;
      cmd_preprocess(pre, config);
      std::cerr << "bundle written to " << pre.out_dir << "\n";
      return 0;
    }
    if (cmd_sel->parsed()) {
      sel.out_file = std::filesystem::path(out_dir) / "selection.json";
      std::filesystem::create_directories(out_dir);
      cmd_select(sel, config);
      std::cerr << "selection written to " << sel.out_file << "\n";
      return 0;
    }
    if (cmd_qry->parsed()) {
      const QueryResult r = cmd_query(qry, config, std::cout);
      return r.hit ? 0 : 3;
    }
    if (cmd_epi->parsed()) {
      epi.seed = seed;
      epi.out_file = std::filesystem::path(out_dir) / "episodes.jsonl";
      std::filesystem::create_directories(out_dir);
      cmd_episode(epi, config, std::cout);
      return 0;
    }
    if (cmd_rew->parsed()) {
      rew.out_file = std::filesystem::path(out_dir) / "rescored.jsonl";
      std::filesystem::create_directories(out_dir);
      cmd_reward(rew, config, std::cout);
      return 0;
    }
    if (cmd_syn->parsed()) {
      syn.out_dir = out_dir;
      syn.seed = seed;
      cmd_synth(syn);
      std::cerr << "scene written to " << syn.out_dir << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
