// Parallel kernels vs their serial reference implementations.
// Build: cmake --build build --target bevkit_bench
// Run:   ./build/bench/bevkit_bench

#include <benchmark/benchmark.h>

#include <random>

#include "bevkit/reference.hpp"
#include "bevkit/synthetic.hpp"

using namespace bevkit;

namespace {

std::vector<Pose> bench_poses(int n) { return random_trajectory(n, 42); }

LEnsemble bench_ensemble(int n) {
  const auto poses = bench_poses(n);
  const auto W = build_banded_affinity(poses, GeometryParams{}, 24);
  const ViewKernel K = heat_kernel(normalized_laplacian(W), 2.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> raw(n);
  for (double& v : raw) v = u(rng);
  const auto q = quality_weights(calibrate_scores(raw, 1.0), 0.5);
  return build_l_ensemble(K, q, 1e-9);
}

FramePoseTable bench_table(int n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FramePoseTable t;
  t.grid.cell_size = 0.05;
  t.grid.width = 256;
  t.grid.height = 256;
  for (int i = 0; i < n; ++i) {
    BevPose p;
    p.x = 256.0 * u(rng);
    p.y = 256.0 * u(rng);
    p.r = 360.0 * u(rng);
    t.entries.push_back({i, p});
  }
  return t;
}

}  // namespace

static void BM_BandedAffinity(benchmark::State& state) {
  const auto poses = bench_poses(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto W = build_banded_affinity(poses, GeometryParams{}, 24);
    benchmark::DoNotOptimize(W.band.data());
  }
}
BENCHMARK(BM_BandedAffinity)->Arg(512)->Arg(2048);

static void BM_BandedAffinitySerialRef(benchmark::State& state) {
  const auto poses = bench_poses(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto W = reference::banded_affinity_dense(poses, GeometryParams{}, 24);
    benchmark::DoNotOptimize(W.data());
  }
}
BENCHMARK(BM_BandedAffinitySerialRef)->Arg(512)->Arg(2048);

static void BM_HeatKernel(benchmark::State& state) {
  const auto poses = bench_poses(static_cast<int>(state.range(0)));
  const Eigen::MatrixXd L =
      normalized_laplacian(build_banded_affinity(poses, GeometryParams{}, 24));
  for (auto _ : state) {
    auto K = heat_kernel(L, 2.0);
    benchmark::DoNotOptimize(K.matrix.data());
  }
}
BENCHMARK(BM_HeatKernel)->Arg(256)->Arg(512);

static void BM_HeatKernelSerialRef(benchmark::State& state) {
  const auto poses = bench_poses(static_cast<int>(state.range(0)));
  const Eigen::MatrixXd L =
      normalized_laplacian(build_banded_affinity(poses, GeometryParams{}, 24));
  for (auto _ : state) {
    auto K = reference::heat_kernel_dense(L, 2.0);
    benchmark::DoNotOptimize(K.data());
  }
}
BENCHMARK(BM_HeatKernelSerialRef)->Arg(256)->Arg(512);

static void BM_GreedyMap(benchmark::State& state) {
  const LEnsemble L = bench_ensemble(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = greedy_map(L, 32);
    benchmark::DoNotOptimize(r.objective);
  }
}
BENCHMARK(BM_GreedyMap)->Arg(256)->Arg(512);

static void BM_GreedyMapNaiveRef(benchmark::State& state) {
  const LEnsemble L = bench_ensemble(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = reference::greedy_map_naive(L, 32);
    benchmark::DoNotOptimize(r.objective);
  }
}
BENCHMARK(BM_GreedyMapNaiveRef)->Arg(256);

static void BM_Retrieve(benchmark::State& state) {
  const auto table = bench_table(static_cast<int>(state.range(0)));
  GroundingParams p;
  BevPose q;
  q.x = 128.0;
  q.y = 128.0;
  q.r = 45.0;
  for (auto _ : state) {
    auto r = retrieve(q, table, p);
    benchmark::DoNotOptimize(r.score);
  }
}
BENCHMARK(BM_Retrieve)->Arg(10000)->Arg(100000);

static void BM_RetrieveScanSerialRef(benchmark::State& state) {
  const auto table = bench_table(static_cast<int>(state.range(0)));
  GroundingParams p;
  BevPose q;
  q.x = 128.0;
  q.y = 128.0;
  q.r = 45.0;
  for (auto _ : state) {
    auto r = reference::retrieve_scan(q, table, p);
    benchmark::DoNotOptimize(r.score);
  }
}
BENCHMARK(BM_RetrieveScanSerialRef)->Arg(10000)->Arg(100000);

static void BM_Backproject(benchmark::State& state) {
  RoomSpec spec;
  spec.frames = 2;
  spec.cloud_points = 1000;
  spec.image_width = 512;
  spec.image_height = 384;
  spec.focal = 300.0;
  const auto scene = generate_room_scene(spec);
  const auto depth = render_depth(scene, 0);
  const auto K = scene.intrinsics();
  for (auto _ : state) {
    auto pc = backproject_depth(depth, K, scene.trajectory[0], 1);
    benchmark::DoNotOptimize(pc.points.data());
  }
}
BENCHMARK(BM_Backproject);

static void BM_BackprojectSerialRef(benchmark::State& state) {
  RoomSpec spec;
  spec.frames = 2;
  spec.cloud_points = 1000;
  spec.image_width = 512;
  spec.image_height = 384;
  spec.focal = 300.0;
  const auto scene = generate_room_scene(spec);
  const auto depth = render_depth(scene, 0);
  const auto K = scene.intrinsics();
  for (auto _ : state) {
    auto pc = reference::backproject_depth_serial(depth, K, scene.trajectory[0], 1);
    benchmark::DoNotOptimize(pc.points.data());
  }
}
BENCHMARK(BM_BackprojectSerialRef);

BENCHMARK_MAIN();
