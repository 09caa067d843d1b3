#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "bevkit/dpp.hpp"
#include "bevkit/io.hpp"
#include "bevkit/reference.hpp"
#include "test_util.hpp"

using namespace bevkit;
using nlohmann::json;
using testutil::TempDir;

namespace {

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::string cli() { return std::string(BEVKIT_CLI_PATH); }

}  // namespace

TEST_CASE("pipeline through the executable") {
  TempDir tmp("cli");
  const std::string scene = (tmp.path() / "scene").string();
  const std::string bundle = (tmp.path() / "bundle").string();
  const std::string quiet = " 2>/dev/null";

  REQUIRE(run(cli() + " --out " + scene + " --seed 9 synth --frames 60 --points 20000" +
              quiet) == 0);
  REQUIRE(run(cli() + " --out " + bundle + " preprocess --trajectory " + scene +
              "/trajectory.jsonl --points " + scene + "/points.bin --scores " + scene +
              "/scores.json" + quiet) == 0);

  SUBCASE("select writes indices and the config echo") {
    const std::string out = (tmp.path() / "sel").string();
    REQUIRE(run(cli() + " --out " + out + " select --bundle " + bundle + quiet) == 0);
    const json sel = json::parse(read_text(out + "/selection.json"));
    CHECK(sel.at("indices").size() == 32);
    CHECK(sel.at("config").at("k").get<int>() == 32);
    CHECK(sel.at("config").at("tau").get<double>() == 2.0);
  }

  SUBCASE("query exit codes distinguish hit, miss, and usage errors") {
    const SceneBundle b = load_bundle(bundle);
    const auto& pose = b.frame_poses.entries[5].pose;
    char camera[160];
    std::snprintf(camera, sizeof(camera), "[%.6f, %.6f, %.6f]", pose.x, pose.y, pose.r);
    const std::string out_file = (tmp.path() / "query.json").string();
    CHECK(run(cli() + " query --bundle " + bundle + " --camera '" + camera + "' > " +
              out_file + quiet) == 0);
    const json hit = json::parse(read_text(out_file));
    CHECK(hit.at("outcome") == "hit");
    CHECK(hit.at("frame_id").get<int>() == 5);
    CHECK(hit.at("config").at("sigma_t").get<double>() == 1.0);

    CHECK(run(cli() + " query --bundle " + bundle +
              " --camera '[5000, 5000, 0]' >/dev/null" + quiet) == 3);
    CHECK(run(cli() + " query --bundle " + bundle + " --camera '[1, 2]' >/dev/null" +
              quiet) == 2);
    CHECK(run(cli() + " query --bundle " + bundle + " --camera 'oops' >/dev/null" +
              quiet) == 2);
  }

  SUBCASE("episode log and unknown policy") {
    const std::string out = (tmp.path() / "epi").string();
    REQUIRE(run(cli() + " --out " + out + " --seed 4 episode --bundle " + bundle +
                " --policy oracle --gold B --gold-frame 2 >/dev/null" + quiet) == 0);
    const auto records = read_episode_log(out + "/episodes.jsonl");
    REQUIRE(records.size() == 1);
    CHECK(records[0].rewards.total == 3.0);

    CHECK(run(cli() + " --out " + out + " episode --bundle " + bundle +
              " --policy guess >/dev/null" + quiet) == 2);
  }

  SUBCASE("reward re-scoring reproduces the log") {
    const std::string out = (tmp.path() / "epi2").string();
    REQUIRE(run(cli() + " --out " + out + " --seed 11 episode --bundle " + bundle +
                " --policy random --episodes 5 >/dev/null" + quiet) == 0);
    const std::string rescored = (tmp.path() / "rw").string();
    REQUIRE(run(cli() + " --out " + rescored + " reward --log " + out +
                "/episodes.jsonl >/dev/null" + quiet) == 0);
    CHECK(read_text(out + "/episodes.jsonl") == read_text(rescored + "/rescored.jsonl"));
  }

  SUBCASE("two runs with one seed are byte-identical") {
    for (const char* tag : {"a", "b"}) {
      const std::string dir = (tmp.path() / tag).string();
      REQUIRE(run(cli() + " --out " + dir + "/scene --seed 33 synth --frames 40 --points "
                  "8000" + quiet) == 0);
      REQUIRE(run(cli() + " --out " + dir + "/bundle preprocess --trajectory " + dir +
                  "/scene/trajectory.jsonl --points " + dir + "/scene/points.bin" +
                  quiet) == 0);
      REQUIRE(run(cli() + " --out " + dir + " select --bundle " + dir +
                  "/bundle --scores " + dir + "/scene/scores.json" + quiet) == 0);
      REQUIRE(run(cli() + " --out " + dir + " --seed 21 episode --bundle " + dir +
                  "/bundle --policy random --episodes 3 >/dev/null" + quiet) == 0);
    }
    for (const char* name : {"/bundle/bev_grid.bin", "/bundle/bev_meta.json",
                             "/bundle/frame_poses.json", "/bundle/manifest.json",
                             "/selection.json", "/episodes.jsonl"}) {
      CHECK(read_text((tmp.path() / "a").string() + name) ==
            read_text((tmp.path() / "b").string() + name));
    }
  }
}

TEST_CASE("golden outputs on the bundled scene") {
  TempDir tmp("golden");
  const std::string scene = (tmp.path() / "scene").string();
  const std::string bundle = (tmp.path() / "bundle").string();
  const std::string quiet = " 2>/dev/null";
  REQUIRE(run(cli() + " --out " + scene + " --seed 123 synth --frames 100 --points 30000" +
              quiet) == 0);
  REQUIRE(run(cli() + " --out " + bundle + " preprocess --trajectory " + scene +
              "/trajectory.jsonl --points " + scene + "/points.bin --scores " + scene +
              "/scores.json" + quiet) == 0);

  SUBCASE("selection matches the recorded first verified run") {
    // verified against the exhaustive oracle on the truncated sub-scene below
    REQUIRE(run(cli() + " --out " + tmp.path().string() + " select --bundle " + bundle +
                quiet) == 0);
    const json sel = json::parse(read_text(tmp.path() / "selection.json"));
    const std::vector<int> expected = {
        99, 26, 98, 27, 97, 25, 96, 28, 24, 95, 23, 29, 94, 22, 93, 30,
        92, 21, 31, 91, 20, 32, 90, 19, 33, 89, 88, 18, 34, 87, 17, 35};
    CHECK(sel.at("indices").get<std::vector<int>>() == expected);
    CHECK(std::abs(sel.at("objective").get<double>() - (-69.257872447082)) < 1e-6);
  }

  SUBCASE("greedy equals the exhaustive optimum on the truncated sub-scene") {
    const SceneBundle b = load_bundle(bundle);
    std::vector<Pose> head(b.trajectory.begin(), b.trajectory.begin() + 12);
    SemanticScores scores;
    scores.raw.assign(b.scores->raw.begin(), b.scores->raw.begin() + 12);
    Config config;
    SelectionParams params = config.selection();
    params.k = 4;
    const auto greedy = select_keyframes(head, scores, params);

    const auto W = build_banded_affinity(head, params.geometry, params.bandwidth);
    const ViewKernel K = heat_kernel(normalized_laplacian(W), params.tau);
    const auto q =
        quality_weights(calibrate_scores(scores.raw, params.temperature), params.alpha);
    const auto exact = exact_map(build_l_ensemble(K, q, params.ridge), 4);
    CHECK(testutil::sorted(greedy.indices) == testutil::sorted(exact.indices));
    CHECK(greedy.objective == doctest::Approx(exact.objective).epsilon(1e-9));
  }

  SUBCASE("query output agrees with the independent full-scan scorer") {
    const std::string out_file = (tmp.path() / "query.json").string();
    const int code = run(cli() + " query --bundle " + bundle +
                         " --camera '[100, 200, 145]' > " + out_file + quiet);
    const json q = json::parse(read_text(out_file));

    const SceneBundle b = load_bundle(bundle);
    BevPose pose;
    pose.x = 100;
    pose.y = 200;
    pose.r = 145;
    Config config;
    const QueryResult oracle =
        reference::retrieve_scan(pose, b.frame_poses, config.grounding());
    CHECK(q.at("frame_id").get<int>() == oracle.frame_id);
    CHECK(std::abs(q.at("score").get<double>() - oracle.score) < 1e-12);
    CHECK(q.at("outcome") == (oracle.hit ? "hit" : "miss"));
    CHECK(code == (oracle.hit ? 0 : 3));
  }
}

TEST_CASE("preprocess input selection and validation") {
  TempDir tmp("pre");
  const std::string scene = (tmp.path() / "scene").string();
  const std::string quiet = " 2>/dev/null";
  REQUIRE(run(cli() + " --out " + scene + " synth --frames 16 --points 6000 --mode depth" +
              quiet) == 0);

  SUBCASE("depth path end to end") {
    const std::string bundle = (tmp.path() / "depth_bundle").string();
    CHECK(run(cli() + " --out " + bundle + " preprocess --trajectory " + scene +
              "/trajectory.jsonl --depths " + scene + "/depths" + quiet) == 0);
    const SceneBundle b = load_bundle(bundle);
    CHECK(b.frame_poses.entries.size() == 16);
  }

  SUBCASE("empty depth directory falls back to the point file") {
    const std::string empty_depths = (tmp.path() / "none").string();
    std::filesystem::create_directories(empty_depths);
    REQUIRE(run(cli() + " --out " + (tmp.path() / "pscene").string() +
                " synth --frames 16 --points 6000" + quiet) == 0);
    const std::string bundle = (tmp.path() / "pt_bundle").string();
    CHECK(run(cli() + " --out " + bundle + " preprocess --trajectory " +
              (tmp.path() / "pscene").string() + "/trajectory.jsonl --depths " +
              empty_depths + " --points " + (tmp.path() / "pscene").string() +
              "/points.bin" + quiet) == 0);
  }

  SUBCASE("frame count mismatch fails") {
    // trajectory with a frame dropped
    const auto poses = read_trajectory_jsonl(scene + "/trajectory.jsonl");
    std::vector<Pose> shorter(poses.begin(), poses.end() - 1);
    const std::string cut = (tmp.path() / "cut.jsonl").string();
    write_trajectory_jsonl(cut, shorter);
    CHECK(run(cli() + " --out " + (tmp.path() / "bad").string() +
              " preprocess --trajectory " + cut + " --depths " + scene + "/depths" +
              quiet) != 0);
  }

  SUBCASE("missing geometry input fails") {
    CHECK(run(cli() + " --out " + (tmp.path() / "bad2").string() +
              " preprocess --trajectory " + scene + "/trajectory.jsonl" + quiet) != 0);
  }

  SUBCASE("config file is honored and echoed") {
    atomic_write_text(tmp.path() / "config.json", "{\"k\": 5, \"alpha\": 0.25}\n");
    const std::string bundle = (tmp.path() / "cfg_bundle").string();
    REQUIRE(run(cli() + " --config " + (tmp.path() / "config.json").string() + " --out " +
                bundle + " preprocess --trajectory " + scene +
                "/trajectory.jsonl --depths " + scene + "/depths" + quiet) == 0);
    REQUIRE(run(cli() + " --config " + (tmp.path() / "config.json").string() + " --out " +
                (tmp.path() / "cfg_sel").string() + " select --bundle " + bundle +
                " --scores " + scene + "/scores.json" + quiet) == 0);
    const json sel = json::parse(read_text((tmp.path() / "cfg_sel").string() +
                                           "/selection.json"));
    CHECK(sel.at("indices").size() == 5);
    CHECK(sel.at("config").at("alpha").get<double>() == 0.25);

    // bad config key is a hard error
    atomic_write_text(tmp.path() / "bad.json", "{\"bogus\": 1}\n");
    CHECK(run(cli() + " --config " + (tmp.path() / "bad.json").string() + " --out " +
              (tmp.path() / "x").string() + " select --bundle " + bundle + quiet) != 0);
  }
}
