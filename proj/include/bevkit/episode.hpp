#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bevkit/grounding.hpp"

namespace bevkit {

enum class AnswerKind { MultipleChoice, Numeric };

/// Agent action: either a pose query on the BEV plane or a terminal answer.
/// Free reasoning text travels alongside as opaque payload.
struct Action {
  enum class Kind { Query, Stop } kind = Kind::Stop;
  BevPose query;
  std::string answer;

  static Action make_query(const BevPose& p) {
    Action a;
    a.kind = Kind::Query;
    a.query = p;
    return a;
  }
  static Action make_stop(std::string answer) {
    Action a;
    a.kind = Kind::Stop;
    a.answer = std::move(answer);
    return a;
  }
};

/// Mutable state of one episode: retrieved evidence in arrival order, the
/// query buffer, and the call budget.
struct EpisodeState {
  std::vector<int> evidence;
  std::vector<std::pair<BevPose, QueryResult>> query_buffer;
  int calls_made = 0;
  bool terminated = false;
  bool capped = false;
  std::optional<std::string> answer;
};

struct Observation {
  enum class Kind { Frame, Error, Terminal } kind = Kind::Terminal;
  int frame_id = -1;
  std::string text;
};

struct TrajectoryStep {
  Action action;
  std::optional<QueryResult> result;
  std::string think;
  std::string turn_text;  // raw emitted turn, scored by the format term
};

/// Completed episode record: interleaved steps, the final answer, the gold
/// target, and the best retrieval score of every tool call.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::optional<std::string> final_answer;
  std::string gold;
  AnswerKind kind = AnswerKind::MultipleChoice;
  std::vector<double> call_scores;
  bool capped = false;
};

struct RewardConfig {
  double lambda_tool = 1.0;
  double lambda_spatial = 1.0;
  double alpha_s = 0.5;
  double theta_sim = 0.5;
};

/// Four-term reward decomposition; total is the lambda-weighted sum and
/// spatial is either 0 or -alpha_s.
struct RewardBreakdown {
  double acc = 0.0;
  double format = 0.0;
  double tool = 0.0;
  double spatial = 0.0;
  double lambda_tool = 1.0;
  double lambda_spatial = 1.0;
  double alpha_s = 0.5;
  double theta_sim = 0.5;
  double total = 0.0;
};

/// Advances the episode by one action. Queries go through retrieval: a hit
/// appends the frame to the evidence set, a miss returns an error
/// observation; either way the call counter advances and hitting t_max
/// terminates the episode with the cap flag. Stop terminates with the
/// answer. Throws StateError on a terminated state.
Observation step(EpisodeState& state, const Action& action,
                 const FramePoseTable& table, const GroundingParams& p);

/// -alpha_s if any tool call scored below theta_sim, else 0; the number of
/// failing calls does not change the penalty.
double spatial_reward(const Trajectory& traj, double theta_sim, double alpha_s);

/// Grammar check of one emitted turn: <think>...</think> followed by exactly
/// one <tool_call>...</tool_call> (valid JSON with "name" and a 3-number
/// "arguments"."camera") or <answer>...</answer>.
bool format_reward_turn(const std::string& turn_text);

/// 1 only if every emitted turn matches the grammar.
double format_reward(const Trajectory& traj);

/// Multiple choice: exact option-letter match, case-insensitive. Numeric:
/// mean over thresholds delta in {0.50, 0.55, ..., 0.95} of the indicator
/// that the relative error stays within 1 - delta. Unparseable answers
/// score 0.
double accuracy_reward(const std::string& answer, const std::string& gold,
                       AnswerKind kind);

/// 1 when the trajectory both used the tool successfully (>= 1 hit) and got
/// the answer right (accuracy > 0), else 0.
double tool_reward(const Trajectory& traj);

RewardBreakdown total_reward(const Trajectory& traj, const RewardConfig& cfg);

/// Group-standardized advantages (R_i - mean) / (population std + 1e-8);
/// requires at least two rewards and always sums to ~0.
std::vector<double> group_advantages(const std::vector<double>& rewards);

}  // namespace bevkit
