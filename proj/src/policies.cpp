#include "bevkit/policies.hpp"

#include <random>

#include <nlohmann/json.hpp>

#include "bevkit/error.hpp"

namespace bevkit {

PolicyKind parse_policy(const std::string& name) {
  if (name == "oracle") return PolicyKind::Oracle;
  if (name == "random") return PolicyKind::Random;
  if (name == "no-tool") return PolicyKind::NoTool;
  throw InputError("unknown policy: " + name + " (expected oracle|random|no-tool)");
}

std::string query_turn_text(const std::string& think, const BevPose& pose) {
  nlohmann::json call = {
      {"name", "video_image_sample_tool"},
      {"arguments", {{"camera", {pose.x, pose.y, pose.r}}}},
  };
  return "<think>" + think + "</think><tool_call>" + call.dump() + "</tool_call>";
}

std::string answer_turn_text(const std::string& think, const std::string& answer) {
  return "<think>" + think + "</think><answer>" + answer + "</answer>";
}

namespace {

const BevPose* stored_pose(const FramePoseTable& table, int frame_id) {
  for (const auto& e : table.entries) {
    if (e.frame_id == frame_id) return &e.pose;
  }
  return nullptr;
}

void record_query(Trajectory& traj, EpisodeState& state, const BevPose& pose,
                  const std::string& think, const FramePoseTable& table,
                  const GroundingParams& params) {
  TrajectoryStep s;
  s.action = Action::make_query(pose);
  s.think = think;
  s.turn_text = query_turn_text(think, pose);
  step(state, s.action, table, params);
  s.result = state.query_buffer.back().second;
  traj.call_scores.push_back(s.result->score);
  traj.steps.push_back(std::move(s));
}

void record_stop(Trajectory& traj, EpisodeState& state, const std::string& answer,
                 const std::string& think, const FramePoseTable& table,
                 const GroundingParams& params) {
  TrajectoryStep s;
  s.action = Action::make_stop(answer);
  s.think = think;
  s.turn_text = answer_turn_text(think, answer);
  step(state, s.action, table, params);
  traj.steps.push_back(std::move(s));
  traj.final_answer = answer;
}

}  // namespace

Trajectory run_episode(PolicyKind policy, const EpisodeTask& task,
                       const FramePoseTable& table, const GroundingParams& params,
                       std::uint64_t seed) {
  Trajectory traj;
  traj.gold = task.gold;
  traj.kind = task.kind;

  EpisodeState state;
  switch (policy) {
    case PolicyKind::Oracle: {
      const BevPose* pose = stored_pose(table, task.gold_frame);
      if (pose == nullptr) {
        throw InputError("oracle policy: gold frame not present in the pose table");
      }
      record_query(traj, state, *pose, "inspect the target viewpoint", table, params);
      if (!state.terminated) {
        record_stop(traj, state, task.gold, "evidence gathered, answering", table, params);
      }
      break;
    }
    case PolicyKind::NoTool: {
      record_stop(traj, state, task.scripted_answer, "answering directly", table, params);
      break;
    }
    case PolicyKind::Random: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      while (!state.terminated) {
        if (unit(rng) < 0.5) {
          BevPose pose;
          pose.x = unit(rng) * table.grid.width;
          pose.y = unit(rng) * table.grid.height;
          pose.r = unit(rng) * 360.0;
          record_query(traj, state, pose, "probe a candidate viewpoint", table, params);
        } else {
          const char letter = static_cast<char>('A' + static_cast<int>(unit(rng) * 4.0));
          record_stop(traj, state, std::string(1, letter), "committing to an answer",
                      table, params);
        }
      }
      break;
    }
  }

  traj.capped = state.capped;
  return traj;
}

}  // namespace bevkit
