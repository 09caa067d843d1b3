#include "bevkit/episode.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "bevkit/error.hpp"

namespace bevkit {

Observation step(EpisodeState& state, const Action& action,
                 const FramePoseTable& table, const GroundingParams& p) {
  if (state.terminated) {
    throw StateError("step: episode already terminated");
  }

  Observation obs;
  if (action.kind == Action::Kind::Stop) {
    state.terminated = true;
    state.answer = action.answer;
    obs.kind = Observation::Kind::Terminal;
    obs.text = action.answer;
    return obs;
  }

  const QueryResult result = retrieve(action.query, table, p);
  state.query_buffer.emplace_back(action.query, result);
  state.calls_made += 1;
  if (result.hit) {
    if (std::find(state.evidence.begin(), state.evidence.end(), result.frame_id) ==
        state.evidence.end()) {
      state.evidence.push_back(result.frame_id);
    }
    obs.kind = Observation::Kind::Frame;
    obs.frame_id = result.frame_id;
  } else {
    obs.kind = Observation::Kind::Error;
    obs.text = "no frame with reliable coverage near the queried pose";
  }

  if (state.calls_made >= p.t_max) {
    state.terminated = true;
    state.capped = true;
  }
  return obs;
}

double spatial_reward(const Trajectory& traj, double theta_sim, double alpha_s) {
  if (!(alpha_s > 0.0)) {
    throw InputError("spatial_reward: alpha_s must be > 0");
  }
  for (double s : traj.call_scores) {
    if (s < theta_sim) return -alpha_s;
  }
  return 0.0;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Extracts the inner text when s is exactly <tag>...</tag> with no trailing
// content and no nested closing tag.
std::optional<std::string_view> inner_block(std::string_view s, std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  if (s.size() < open.size() + close.size()) return std::nullopt;
  if (s.substr(0, open.size()) != open) return std::nullopt;
  if (s.substr(s.size() - close.size()) != close) return std::nullopt;
  const std::string_view inner = s.substr(open.size(), s.size() - open.size() - close.size());
  if (inner.find(close) != std::string_view::npos) return std::nullopt;
  return inner;
}

bool valid_tool_call_payload(std::string_view payload) {
  nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  if (!j.contains("name") || !j["name"].is_string()) return false;
  if (!j.contains("arguments") || !j["arguments"].is_object()) return false;
  const auto& args = j["arguments"];
  if (!args.contains("camera") || !args["camera"].is_array()) return false;
  const auto& cam = args["camera"];
  if (cam.size() != 3) return false;
  for (const auto& v : cam) {
    if (!v.is_number()) return false;
  }
  return true;
}

}  // namespace

bool format_reward_turn(const std::string& turn_text) {
  std::string_view s = trim(turn_text);
  constexpr std::string_view think_open = "<think>";
  constexpr std::string_view think_close = "</think>";
  if (s.substr(0, think_open.size()) != think_open) return false;
  const std::size_t close_at = s.find(think_close);
  if (close_at == std::string_view::npos) return false;

  const std::string_view rest = trim(s.substr(close_at + think_close.size()));
  if (const auto payload = inner_block(rest, "tool_call")) {
    return valid_tool_call_payload(*payload);
  }
  return inner_block(rest, "answer").has_value();
}

double format_reward(const Trajectory& traj) {
  for (const auto& step : traj.steps) {
    if (!format_reward_turn(step.turn_text)) return 0.0;
  }
  return traj.steps.empty() ? 0.0 : 1.0;
}

namespace {

// First standalone single letter A-E, however the answer is phrased.
std::optional<char> extract_option_letter(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!std::isalpha(static_cast<unsigned char>(c))) continue;
    const bool prev_alnum = i > 0 && std::isalnum(static_cast<unsigned char>(text[i - 1]));
    const bool next_alnum =
        i + 1 < text.size() && std::isalnum(static_cast<unsigned char>(text[i + 1]));
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (!prev_alnum && !next_alnum && up >= 'A' && up <= 'E') return up;
    // skip the rest of this word
    while (i + 1 < text.size() && std::isalnum(static_cast<unsigned char>(text[i + 1]))) ++i;
  }
  return std::nullopt;
}

std::optional<double> extract_number(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+' || c == '.') && i + 1 < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      try {
        std::size_t used = 0;
        const double v = std::stod(text.substr(i), &used);
        if (used > 0 && std::isfinite(v)) return v;
      } catch (const std::exception&) {
      }
    }
  }
  return std::nullopt;
}

}  // namespace

double accuracy_reward(const std::string& answer, const std::string& gold,
                       AnswerKind kind) {
  if (gold.empty()) {
    throw InputError("accuracy_reward: gold answer must be non-empty");
  }
  if (kind == AnswerKind::MultipleChoice) {
    const auto got = extract_option_letter(answer);
    const auto want = extract_option_letter(gold);
    return (got && want && *got == *want) ? 1.0 : 0.0;
  }

  const auto got = extract_number(answer);
  const auto want = extract_number(gold);
  if (!got || !want) return 0.0;
  const double rel = std::abs(*got - *want) / std::max(std::abs(*want), 1e-9);
  double acc = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double delta = 0.50 + 0.05 * i;
    if (rel <= 1.0 - delta) acc += 0.1;
  }
  return acc;
}

double tool_reward(const Trajectory& traj) {
  bool any_hit = false;
  for (const auto& step : traj.steps) {
    if (step.result && step.result->hit) {
      any_hit = true;
      break;
    }
  }
  if (!any_hit) return 0.0;
  const double acc =
      accuracy_reward(traj.final_answer.value_or(""), traj.gold, traj.kind);
  return acc > 0.0 ? 1.0 : 0.0;
}

RewardBreakdown total_reward(const Trajectory& traj, const RewardConfig& cfg) {
  RewardBreakdown r;
  r.lambda_tool = cfg.lambda_tool;
  r.lambda_spatial = cfg.lambda_spatial;
  r.alpha_s = cfg.alpha_s;
  r.theta_sim = cfg.theta_sim;
  r.acc = accuracy_reward(traj.final_answer.value_or(""), traj.gold, traj.kind);
  r.format = format_reward(traj);
  r.tool = tool_reward(traj);
  r.spatial = spatial_reward(traj, cfg.theta_sim, cfg.alpha_s);
  r.total = r.acc + r.format + cfg.lambda_tool * r.tool + cfg.lambda_spatial * r.spatial;
  return r;
}

std::vector<double> group_advantages(const std::vector<double>& rewards) {
  const std::size_t g = rewards.size();
  if (g < 2) {
    throw InputError("group_advantages: need a group of at least 2");
  }
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);
  const double denom = std::sqrt(var) + 1e-8;

  std::vector<double> adv(g);
  for (std::size_t i = 0; i < g; ++i) adv[i] = (rewards[i] - mean) / denom;
  return adv;
}

}  // namespace bevkit
