// Microbenchmarks for the hot paths: voxel indexing, vote clustering,
// projection, mask lifting and the whole per-scene pipeline.
#include <benchmark/benchmark.h>

#include <random>

#include "sparsefusion/pipeline.hpp"
#include "sparsefusion/serialize.hpp"

using namespace sparsefusion;

namespace {

std::vector<Vec3> random_cloud(std::size_t n, double span, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-span, span);
  std::vector<Vec3> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    points.push_back({coord(rng), coord(rng), coord(rng) * 0.05});
  }
  return points;
}

Scene benchmark_scene(std::uint64_t seed) {
  RunConfig cfg = default_run_config();
  cfg.scene.seed = seed;
  Scene scene = generate_scene(cfg.scene);
  scene.masks = render_masks(scene);
  return scene;
}

void BM_Voxelize(benchmark::State& state) {
  const auto cloud = random_cloud(state.range(0), 54.0, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(voxelize(cloud, {0.2, 0.2, 0.2}, {}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Voxelize)->Arg(2000)->Arg(20000)->Arg(100000);

void BM_CclCluster(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const std::size_t n = state.range(0);
  const auto points = random_cloud(n, 50.0, 3);
  std::vector<Vote> votes;
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  for (std::size_t i = 0; i < n; ++i) {
    votes.push_back({static_cast<int>(i), {coord(rng), coord(rng), 0.0}});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ccl_cluster(votes, points, 0.5, 2));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CclCluster)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_ProjectPoints(benchmark::State& state) {
  const auto rig = make_camera_rig(6, 800, 450, 70.0, 3.0);
  const auto cloud = random_cloud(state.range(0), 54.0, 4);
  for (auto _ : state) {
    std::size_t hits = 0;
    for (const Vec3& p : cloud) {
      if (project(p, rig[0])) ++hits;
    }
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProjectPoints)->Arg(20000)->Arg(200000);

void BM_MaskClose(benchmark::State& state) {
  Bitmap bm(800, 450);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> x(100, 700), y(50, 400);
  for (int i = 0; i < 4000; ++i) bm.set(x(rng), y(rng));
  for (auto _ : state) {
    Bitmap copy = bm;
    copy.dilate(1);
    copy.erode(1);
    benchmark::DoNotOptimize(copy.count());
  }
}
BENCHMARK(BM_MaskClose);

void BM_ScenePipeline(benchmark::State& state) {
  const Scene scene = benchmark_scene(state.range(0));
  const RunConfig cfg = default_run_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_scene_pipeline(scene, cfg.scene.classes, cfg.pipeline));
  }
}
BENCHMARK(BM_ScenePipeline)->Arg(1)->Arg(2);

}  // namespace
