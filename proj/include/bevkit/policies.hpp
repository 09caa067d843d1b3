#pragma once

#include <cstdint>
#include <string>

#include "bevkit/episode.hpp"

namespace bevkit {

/// Scripted episode policies for the verification harness: the oracle
/// queries the gold frame's stored pose and answers gold, the random policy
/// samples poses and answers from a seeded generator, and the no-tool policy
/// answers immediately.
enum class PolicyKind { Oracle, Random, NoTool };

PolicyKind parse_policy(const std::string& name);  // "oracle" | "random" | "no-tool"

struct EpisodeTask {
  std::string gold = "A";
  AnswerKind kind = AnswerKind::MultipleChoice;
  int gold_frame = 0;
  std::string scripted_answer = "A";  // what the no-tool policy answers
};

Trajectory run_episode(PolicyKind policy, const EpisodeTask& task,
                       const FramePoseTable& table, const GroundingParams& params,
                       std::uint64_t seed);

/// Canonical turn texts the scripted policies emit.
std::string query_turn_text(const std::string& think, const BevPose& pose);
std::string answer_turn_text(const std::string& think, const std::string& answer);

}  // namespace bevkit
