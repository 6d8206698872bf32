#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "sparsefusion/lidar_query.hpp"
#include "test_util.hpp"

using namespace sparsefusion;
using namespace sparsefusion::testing;

TEST_CASE("voxelize: cell boundaries and partition property") {
  const Vec3 size{0.2, 0.2, 0.2};
  const VoxelGrid same_cell = voxelize({{0.05, 0, 0}, {0.10, 0, 0}}, size, {});
  CHECK(same_cell.occupied_cells() == 1);

  const VoxelGrid split = voxelize({{0.19, 0, 0}, {0.21, 0, 0}}, size, {});
  CHECK(split.occupied_cells() == 2);

  std::mt19937_64 rng(201);
  std::vector<Vec3> cloud;
  for (int i = 0; i < 3000; ++i) cloud.push_back(random_point(rng, 40.0));
  const VoxelGrid grid = voxelize(cloud, size, {0.1, -0.3, 0.0});
  CHECK(grid.occupied_cells() <= cloud.size());
  std::vector<int> seen;
  for (const auto& [coord, indices] : grid.cells) {
    for (int idx : indices) {
      seen.push_back(idx);
      const Vec3& p = cloud[idx];
      CHECK(static_cast<std::int64_t>(
                std::floor((p.x - grid.origin.x) / size.x)) == coord.x);
      CHECK(static_cast<std::int64_t>(
                std::floor((p.y - grid.origin.y) / size.y)) == coord.y);
      CHECK(static_cast<std::int64_t>(
                std::floor((p.z - grid.origin.z) / size.z)) == coord.z);
    }
  }
  std::sort(seen.begin(), seen.end());
  REQUIRE(seen.size() == cloud.size());
  for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == static_cast<int>(i));

  CHECK_THROWS_AS(voxelize(cloud, {0.0, 0.2, 0.2}, {}), std::invalid_argument);
}

namespace {

Scene one_object_scene(std::uint64_t seed, std::size_t n_points,
                       const Box3& box) {
  return build_scene({{box, 0, 0, 50.0}}, {n_points}, 200, 30.0, seed,
                     make_camera_rig(6, 640, 360, 70.0, 2.5));
}

}  // namespace

TEST_CASE("oracle_score: flip semantics") {
  const Scene scene =
      one_object_scene(5, 150, Box3({8, 3, 0.8}, 4.0, 1.8, 1.6, 0.4));
  const auto clean = oracle_score(scene, 0.0, 77);
  REQUIRE(clean.size() == scene.points.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    bool inside = false;
    for (const auto& g : scene.gt) {
      inside = inside || point_in_box3(scene.points[i].position, g.box);
    }
    CHECK(clean[i] == (inside ? 1.0 : 0.0));
  }

  const auto flipped = oracle_score(scene, 1.0, 77);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    CHECK(flipped[i] == 1.0 - clean[i]);
  }
}

TEST_CASE("oracle_score: flip fraction within binomial bound") {
  Scene scene = one_object_scene(6, 5000, Box3({8, 3, 0.8}, 4, 1.8, 1.6, 0.4));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5000; ++i) {
    scene.points.push_back({random_point(rng, 28.0), kBackgroundId});
  }
  const auto clean = oracle_score(scene, 0.0, 88);
  const auto noisy = oracle_score(scene, 0.1, 88);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) flips += clean[i] != noisy[i];
  const double fraction = static_cast<double>(flips) / clean.size();
  CHECK(fraction > 0.09);
  CHECK(fraction < 0.11);
}

TEST_CASE("oracle_vote: exact centers, threshold, noise concentration") {
  const Box3 box({8, 3, 0.8}, 4.0, 1.8, 1.6, 0.4);
  const Scene scene = one_object_scene(7, 200, box);
  const auto points = scene.point_positions();
  const auto scores = oracle_score(scene, 0.0, 5);

  const auto clean_votes = oracle_vote(scene, points, scores, 0.5, 0.0, 5);
  for (const Vote& v : clean_votes) {
    // All >= threshold points here are true foreground.
    CHECK((v.voted_center - box.center).norm() < 1e-12);
  }

  CHECK(oracle_vote(scene, points, scores, 1.1, 0.0, 5).empty());

  const auto noisy_votes = oracle_vote(scene, points, scores, 0.5, 0.1, 5);
  REQUIRE(noisy_votes.size() == 200);
  Vec3 mean;
  for (const Vote& v : noisy_votes) mean += v.voted_center;
  mean = mean * (1.0 / noisy_votes.size());
  CHECK((mean - box.center).norm() < 0.03);  // 3 sigma / sqrt(200)
}

TEST_CASE("ccl_cluster: radius edges") {
  const std::vector<Vec3> points{{0, 0, 0}, {0.4, 0, 0}, {10, 0, 0}};
  const std::vector<Vote> close{{0, {0, 0, 0}}, {1, {0.4, 0, 0}}};
  CHECK(ccl_cluster(close, points, 0.5, 1).size() == 1);
  CHECK(ccl_cluster(close, points, 0.5, 2).size() == 1);

  const std::vector<Vote> apart{{0, {0, 0, 0}}, {1, {0.6, 0, 0}}};
  CHECK(ccl_cluster(apart, points, 0.5, 1).size() == 2);
  CHECK(ccl_cluster(apart, points, 0.5, 2).empty());

  CHECK_THROWS_AS(ccl_cluster(close, points, 0.0, 1), std::invalid_argument);
}

TEST_CASE("ccl_cluster: spatial hash agrees with brute force") {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> count(2, 300);
  std::uniform_real_distribution<double> span(1.0, 12.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = count(rng);
    const double s = span(rng);
    std::vector<Vote> votes;
    std::vector<Vec3> points;
    std::uniform_real_distribution<double> coord(0.0, s);
    for (int i = 0; i < n; ++i) {
      points.push_back({coord(rng), coord(rng), coord(rng)});
      votes.push_back({i, {coord(rng), coord(rng), coord(rng)}});
    }
    for (std::size_t min_pts : {std::size_t{1}, std::size_t{2}}) {
      const auto got = partition_of(ccl_cluster(votes, points, 0.5, min_pts));
      const auto want = ccl_brute_force(votes, 0.5, min_pts);
      CHECK(got == want);
    }
  }
}

TEST_CASE("ccl_cluster: partition invariant under input permutation") {
  std::mt19937_64 rng(203);
  std::vector<Vote> votes;
  std::vector<Vec3> points;
  std::uniform_real_distribution<double> coord(0.0, 6.0);
  for (int i = 0; i < 120; ++i) {
    points.push_back({coord(rng), coord(rng), coord(rng)});
    votes.push_back({i, {coord(rng), coord(rng), coord(rng)}});
  }
  const auto base = partition_of(ccl_cluster(votes, points, 0.5, 2));
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(votes.begin(), votes.end(), rng);
    CHECK(partition_of(ccl_cluster(votes, points, 0.5, 2)) == base);
  }
}

TEST_CASE("clean separated objects give one cluster each") {
  const Box3 a({5, 0, 0.8}, 1.5, 1.5, 1.6, 0.0);
  const Box3 b({-6, 4, 0.8}, 1.5, 1.5, 1.6, 0.9);
  Scene scene = build_scene({{a, 0, 0, 50.0}, {b, 0, 1, 50.0}}, {50, 50}, 0,
                            20.0, 3, make_camera_rig(6, 640, 360, 70.0, 2.5));
  const auto points = scene.point_positions();
  const auto scores = oracle_score(scene, 0.0, 1);
  const auto votes = oracle_vote(scene, points, scores, 0.5, 0.0, 1);
  const auto clusters = ccl_cluster(votes, points, 0.5, 2);
  CHECK(clusters.size() == 2);
}

TEST_CASE("crowded pair closer than the radius merges into one cluster") {
  // Two objects 0.3 m apart: votes collapse onto two centers 0.3 m apart,
  // below the 0.5 m connect radius.
  const Box3 a({10, 0, 0.5}, 0.2, 0.2, 1.0, 0.0);
  const Box3 b({10, 0.3, 0.5}, 0.2, 0.2, 1.0, 0.0);
  Scene scene = build_scene({{a, 0, 0, 50.0}, {b, 0, 1, 50.0}}, {25, 25}, 0,
                            20.0, 9, make_camera_rig(6, 640, 360, 70.0, 2.5));
  const auto points = scene.point_positions();
  const auto scores = oracle_score(scene, 0.0, 2);
  const auto votes = oracle_vote(scene, points, scores, 0.5, 0.0, 2);
  const auto clusters = ccl_cluster(votes, points, 0.5, 2);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].point_indices.size() == 50);
}

TEST_CASE("make_lidar_queries: centroids") {
  const std::vector<Vec3> points{{1, 1, 1}, {3, 3, 3}, {-7, 0, 2}};
  Cluster single;
  single.point_indices = {2};
  single.position = points[2];
  const auto queries = make_lidar_queries({single}, points);
  REQUIRE(queries.size() == 1);
  CHECK(queries[0].modality == Modality::kLidar);
  CHECK_FALSE(queries[0].source_box2.has_value());
  CHECK((queries[0].position - points[2]).norm() == 0.0);

  std::mt19937_64 rng(204);
  std::vector<Vec3> cloud;
  for (int i = 0; i < 64; ++i) cloud.push_back(random_point(rng));
  Cluster all;
  for (int i = 0; i < 64; ++i) all.point_indices.push_back(i);
  const auto q = make_lidar_queries({all}, cloud);
  Vec3 mean;
  for (const Vec3& p : cloud) mean += p;
  mean = mean * (1.0 / 64.0);
  CHECK((q[0].position - mean).norm() < 1e-9);
}
