#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "bevkit/episode.hpp"
#include "bevkit/error.hpp"
#include "bevkit/policies.hpp"

using namespace bevkit;
using doctest::Approx;

namespace {

FramePoseTable small_table() {
  FramePoseTable t;
  t.grid.cell_size = 1.0;
  t.grid.origin = Eigen::Vector2d(0.0, 0.0);
  t.grid.width = 50;
  t.grid.height = 50;
  for (int i = 0; i < 5; ++i) {
    BevPose p;
    p.x = 10.0 * i;
    p.y = 5.0;
    p.r = 45.0 * i;
    t.entries.push_back({i, p});
  }
  return t;
}

BevPose far_pose() {
  BevPose p;
  p.x = 2000.0;
  p.y = 2000.0;
  p.r = 0.0;
  return p;
}

Trajectory query_then_answer(const std::vector<double>& call_scores,
                             const std::vector<bool>& hits, const std::string& answer,
                             const std::string& gold) {
  Trajectory t;
  t.gold = gold;
  t.kind = AnswerKind::MultipleChoice;
  for (std::size_t i = 0; i < call_scores.size(); ++i) {
    TrajectoryStep s;
    BevPose p;
    p.x = 1.0 + i;
    s.action = Action::make_query(p);
    QueryResult qr;
    qr.hit = hits[i];
    qr.frame_id = static_cast<int>(i);
    qr.score = call_scores[i];
    s.result = qr;
    s.turn_text = query_turn_text("looking", p);
    t.steps.push_back(s);
    t.call_scores.push_back(call_scores[i]);
  }
  TrajectoryStep stop;
  stop.action = Action::make_stop(answer);
  stop.turn_text = answer_turn_text("done", answer);
  t.steps.push_back(stop);
  t.final_answer = answer;
  return t;
}

}  // namespace

TEST_CASE("episode stepping") {
  const auto table = small_table();
  GroundingParams p;
  p.t_max = 6;

  SUBCASE("stop on a fresh state") {
    EpisodeState s;
    const auto obs = step(s, Action::make_stop("A"), table, p);
    CHECK(s.terminated);
    CHECK(s.calls_made == 0);
    CHECK(s.answer == "A");
    CHECK(obs.kind == Observation::Kind::Terminal);
  }
  SUBCASE("hit grows the evidence set") {
    EpisodeState s;
    const auto obs = step(s, Action::make_query(table.entries[2].pose), table, p);
    CHECK(obs.kind == Observation::Kind::Frame);
    CHECK(obs.frame_id == 2);
    CHECK(s.evidence == std::vector<int>{2});
    CHECK(s.calls_made == 1);
    CHECK(s.query_buffer.size() == 1);

    // repeated retrieval keeps the evidence set deduplicated
    step(s, Action::make_query(table.entries[2].pose), table, p);
    CHECK(s.evidence == std::vector<int>{2});
    CHECK(s.query_buffer.size() == 2);
  }
  SUBCASE("miss returns an error observation") {
    EpisodeState s;
    const auto obs = step(s, Action::make_query(far_pose()), table, p);
    CHECK(obs.kind == Observation::Kind::Error);
    CHECK(s.evidence.empty());
    CHECK(s.calls_made == 1);
  }
  SUBCASE("the sixth call terminates under the cap") {
    EpisodeState s;
    for (int i = 0; i < 5; ++i) {
      step(s, Action::make_query(table.entries[0].pose), table, p);
      CHECK_FALSE(s.terminated);
    }
    step(s, Action::make_query(table.entries[0].pose), table, p);
    CHECK(s.terminated);
    CHECK(s.capped);
    CHECK(s.calls_made == 6);
  }
  SUBCASE("acting on a terminated state is an error") {
    EpisodeState s;
    step(s, Action::make_stop("B"), table, p);
    CHECK_THROWS_AS(step(s, Action::make_stop("C"), table, p), StateError);
  }
}

TEST_CASE("spatial penalty") {
  SUBCASE("no tool calls") {
    Trajectory t;
    t.gold = "A";
    CHECK(spatial_reward(t, 0.5, 0.5) == 0.0);
  }
  SUBCASE("one failing call") {
    const auto t = query_then_answer({0.3}, {false}, "A", "A");
    CHECK(spatial_reward(t, 0.5, 0.5) == Approx(-0.5));
  }
  SUBCASE("many failing calls score the same as one") {
    const auto one = query_then_answer({0.3}, {false}, "A", "A");
    const auto three = query_then_answer({0.3, 0.1, 0.2}, {false, false, false}, "A", "A");
    CHECK(spatial_reward(one, 0.5, 0.5) == spatial_reward(three, 0.5, 0.5));
  }
  SUBCASE("duplicating a failing call never changes the penalty") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int calls = 1 + static_cast<int>(rng() % 5);
      std::vector<double> scores;
      std::vector<bool> hits;
      for (int i = 0; i < calls; ++i) {
        scores.push_back(u(rng));
        hits.push_back(scores.back() >= 0.5);
      }
      auto t = query_then_answer(scores, hits, "A", "A");
      const double before = spatial_reward(t, 0.5, 0.5);
      // duplicate the worst call
      const double worst = *std::min_element(scores.begin(), scores.end());
      auto dup_scores = scores;
      dup_scores.push_back(worst);
      auto dup_hits = hits;
      dup_hits.push_back(worst >= 0.5);
      const auto dup = query_then_answer(dup_scores, dup_hits, "A", "A");
      CHECK(spatial_reward(dup, 0.5, 0.5) == before);
    }
  }
  SUBCASE("alpha_s must be positive") {
    Trajectory t;
    t.gold = "A";
    CHECK_THROWS_AS(spatial_reward(t, 0.5, 0.0), InputError);
  }
}

TEST_CASE("format grammar") {
  CHECK(format_reward_turn("<think>x</think><answer>A</answer>"));
  CHECK_FALSE(format_reward_turn("<answer>A</answer>"));

  // tool-call turn exactly as the interface specifies it
  const std::string tool_turn =
      "<think>x</think><tool_call>{\"name\": \"video_image_sample_tool\", "
      "\"arguments\": {\"camera\": [100, 200, 145]}}</tool_call>";
  CHECK(format_reward_turn(tool_turn));

  SUBCASE("whitespace between blocks is fine") {
    CHECK(format_reward_turn("<think>x</think>  <answer>A</answer>"));
    CHECK(format_reward_turn("  <think>x</think>\n<answer>A</answer>\n"));
  }
  SUBCASE("single-character corruptions are rejected") {
    const std::string good = "<think>x</think><answer>A</answer>";
    for (std::size_t i = 0; i < good.size(); ++i) {
      if (good[i] == 'x' || good[i] == 'A') continue;  // payload bytes are free text
      std::string corrupt = good;
      corrupt.erase(i, 1);
      CHECK_FALSE(format_reward_turn(corrupt));
    }
  }
  SUBCASE("two payload blocks are rejected") {
    CHECK_FALSE(format_reward_turn(
        "<think>x</think><answer>A</answer><answer>B</answer>"));
    CHECK_FALSE(format_reward_turn(
        "<think>x</think><tool_call>{\"name\":\"t\",\"arguments\":{\"camera\":[1,2,3]}}"
        "</tool_call><answer>A</answer>"));
  }
  SUBCASE("tool call payload must be valid") {
    CHECK_FALSE(format_reward_turn("<think>x</think><tool_call>not json</tool_call>"));
    CHECK_FALSE(format_reward_turn(
        "<think>x</think><tool_call>{\"arguments\":{\"camera\":[1,2,3]}}</tool_call>"));
    CHECK_FALSE(format_reward_turn(
        "<think>x</think><tool_call>{\"name\":\"t\",\"arguments\":{\"camera\":[1,2]}}"
        "</tool_call>"));
    CHECK_FALSE(format_reward_turn(
        "<think>x</think><tool_call>{\"name\":\"t\",\"arguments\":{\"camera\":[1,2,\"a\"]}}"
        "</tool_call>"));
  }
  SUBCASE("a trajectory needs every turn to match") {
    auto t = query_then_answer({0.9}, {true}, "A", "A");
    CHECK(format_reward(t) == 1.0);
    t.steps[0].turn_text = "<think>broken";
    CHECK(format_reward(t) == 0.0);
  }
}

TEST_CASE("accuracy scoring") {
  SUBCASE("multiple choice is case-insensitive") {
    CHECK(accuracy_reward("B", "b", AnswerKind::MultipleChoice) == 1.0);
    CHECK(accuracy_reward("a", "A", AnswerKind::MultipleChoice) == 1.0);
    CHECK(accuracy_reward("C", "B", AnswerKind::MultipleChoice) == 0.0);
    CHECK(accuracy_reward("the answer is C", "C", AnswerKind::MultipleChoice) == 1.0);
    CHECK(accuracy_reward("", "A", AnswerKind::MultipleChoice) == 0.0);
  }
  SUBCASE("exact numeric answers get full credit") {
    CHECK(accuracy_reward("3.25", "3.25", AnswerKind::Numeric) == Approx(1.0));
    CHECK(accuracy_reward("around 3.25 meters", "3.25", AnswerKind::Numeric) == Approx(1.0));
  }
  SUBCASE("100 percent relative error gets nothing") {
    CHECK(accuracy_reward("0", "5", AnswerKind::Numeric) == 0.0);
    CHECK(accuracy_reward("10", "5", AnswerKind::Numeric) == 0.0);
  }
  SUBCASE("threshold sweep matches an independent computation") {
    const double gold = 8.0;
    const double answer = 8.0 * 1.18;  // 18% relative error
    double expect = 0.0;
    for (int i = 0; i < 10; ++i) {
      if (0.18 <= 1.0 - (0.50 + 0.05 * i) + 1e-12) expect += 0.1;
    }
    CHECK(accuracy_reward(std::to_string(answer), std::to_string(gold),
                          AnswerKind::Numeric) == Approx(expect));
  }
  SUBCASE("unparseable numeric answers score zero") {
    CHECK(accuracy_reward("no idea", "5", AnswerKind::Numeric) == 0.0);
  }
  SUBCASE("empty gold is rejected") {
    CHECK_THROWS_AS(accuracy_reward("A", "", AnswerKind::MultipleChoice), InputError);
  }
}

TEST_CASE("tool bonus is outcome-conditioned") {
  CHECK(tool_reward(query_then_answer({0.9}, {true}, "A", "A")) == 1.0);
  CHECK(tool_reward(query_then_answer({}, {}, "A", "A")) == 0.0);
  CHECK(tool_reward(query_then_answer({0.9, 0.8}, {true, true}, "B", "A")) == 0.0);
  CHECK(tool_reward(query_then_answer({0.2}, {false}, "A", "A")) == 0.0);
}

TEST_CASE("total reward composition") {
  RewardConfig cfg;  // lambdas 1, alpha_s 0.5, theta 0.5

  SUBCASE("perfect trajectory totals 3") {
    const auto t = query_then_answer({0.9}, {true}, "A", "A");
    const auto r = total_reward(t, cfg);
    CHECK(r.acc == 1.0);
    CHECK(r.format == 1.0);
    CHECK(r.tool == 1.0);
    CHECK(r.spatial == 0.0);
    CHECK(r.total == Approx(3.0));
  }
  SUBCASE("zero-everything with one failing call totals -0.5") {
    auto t = query_then_answer({0.3}, {false}, "", "A");
    t.final_answer.reset();
    for (auto& s : t.steps) s.turn_text = "";  // corrupt every turn
    const auto r = total_reward(t, cfg);
    CHECK(r.acc == 0.0);
    CHECK(r.format == 0.0);
    CHECK(r.tool == 0.0);
    CHECK(r.spatial == Approx(-0.5));
    CHECK(r.total == Approx(-0.5));
  }
  SUBCASE("zero weights reduce to accuracy plus format") {
    RewardConfig off = cfg;
    off.lambda_tool = 0.0;
    off.lambda_spatial = 0.0;
    const auto t = query_then_answer({0.3}, {false}, "A", "A");
    const auto r = total_reward(t, off);
    CHECK(r.total == Approx(r.acc + r.format));
  }
  SUBCASE("decomposition identity holds to 1e-12") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int calls = static_cast<int>(rng() % 4);
      std::vector<double> scores;
      std::vector<bool> hits;
      for (int i = 0; i < calls; ++i) {
        scores.push_back(u(rng));
        hits.push_back(scores.back() >= 0.5);
      }
      RewardConfig c;
      c.lambda_tool = u(rng) * 2.0;
      c.lambda_spatial = u(rng) * 2.0;
      c.alpha_s = 0.1 + u(rng);
      c.theta_sim = u(rng);
      const auto t = query_then_answer(scores, hits, u(rng) > 0.5 ? "A" : "B", "A");
      const auto r = total_reward(t, c);
      const double recomputed =
          r.acc + r.format + c.lambda_tool * r.tool + c.lambda_spatial * r.spatial;
      CHECK(std::abs(r.total - recomputed) <= 1e-12);
      CHECK((r.spatial == 0.0 || r.spatial == -c.alpha_s));
    }
  }
}

TEST_CASE("group advantages") {
  SUBCASE("two-point standardization") {
    const auto adv = group_advantages({1.0, 0.0});
    CHECK(adv[0] == Approx(1.0).epsilon(1e-6));
    CHECK(adv[1] == Approx(-1.0).epsilon(1e-6));
  }
  SUBCASE("constant rewards vanish") {
    const auto adv = group_advantages({0.7, 0.7, 0.7});
    for (double a : adv) CHECK(a == Approx(0.0));
  }
  SUBCASE("standardized moments on random rewards") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-2.0, 3.0);
    std::vector<double> rewards(64);
    for (double& r : rewards) r = u(rng);
    const auto adv = group_advantages(rewards);

    double mean = 0.0;
    for (double a : adv) mean += a;
    CHECK(std::abs(mean) < 1e-9);

    double var = 0.0;
    for (double a : adv) var += (a - mean / adv.size()) * (a - mean / adv.size());
    var /= adv.size();
    CHECK(std::sqrt(var) == Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("groups below two are rejected") {
    CHECK_THROWS_AS(group_advantages({1.0}), InputError);
    CHECK_THROWS_AS(group_advantages({}), InputError);
  }
}

TEST_CASE("scripted policies exercise the reward branches") {
  const auto table = small_table();
  GroundingParams p;
  RewardConfig cfg;

  SUBCASE("oracle earns the full reward") {
    EpisodeTask task;
    task.gold = "C";
    task.gold_frame = 3;
    const auto t = run_episode(PolicyKind::Oracle, task, table, p, 1);
    const auto r = total_reward(t, cfg);
    CHECK(r.total == Approx(3.0));
    CHECK(t.call_scores.size() == 1);
    CHECK(t.call_scores[0] == 1.0);
  }
  SUBCASE("no-tool with the wrong answer keeps only format") {
    EpisodeTask task;
    task.gold = "C";
    task.scripted_answer = "A";
    const auto t = run_episode(PolicyKind::NoTool, task, table, p, 1);
    const auto r = total_reward(t, cfg);
    CHECK(r.acc == 0.0);
    CHECK(r.format == 1.0);
    CHECK(r.tool == 0.0);
    CHECK(r.total == Approx(1.0));
  }
  SUBCASE("random policy is seed-deterministic") {
    EpisodeTask task;
    const auto a = run_episode(PolicyKind::Random, task, table, p, 42);
    const auto b = run_episode(PolicyKind::Random, task, table, p, 42);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      CHECK(a.steps[i].turn_text == b.steps[i].turn_text);
    }
    CHECK(a.capped == b.capped);
  }
  SUBCASE("policy names parse") {
    CHECK(parse_policy("oracle") == PolicyKind::Oracle);
    CHECK(parse_policy("random") == PolicyKind::Random);
    CHECK(parse_policy("no-tool") == PolicyKind::NoTool);
    CHECK_THROWS_AS(parse_policy("llm"), InputError);
  }
}
