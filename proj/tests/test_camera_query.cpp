#include <doctest.h>

#include <cmath>
#include <map>

#include "sparsefusion/camera_query.hpp"
#include "sparsefusion/lidar_query.hpp"
#include "test_util.hpp"

using namespace sparsefusion;
using namespace sparsefusion::testing;

namespace {

InstanceMask single_bit_mask(const CameraModel& cam, int x, int y,
                             int instance = 0, int cls = 0) {
  InstanceMask mask;
  mask.camera_index = 0;
  mask.instance_id = instance;
  mask.class_id = cls;
  mask.bitmap = Bitmap(cam.image_w, cam.image_h);
  mask.bitmap.set(x, y);
  refresh_mask_bounds(mask);
  return mask;
}

}  // namespace

TEST_CASE("lift_mask: exact pixel hit and depth window") {
  const CameraModel cam = make_camera(0.0, {0, 0, 1.5});
  const Vec3 on_pixel = unproject(333, 205, 10.0, cam);
  const Vec3 too_deep = unproject(333, 205, 95.0, cam);
  const Vec3 elsewhere = unproject(100, 100, 10.0, cam);
  const std::vector<Vec3> points{on_pixel, too_deep, elsewhere};

  const InstanceMask mask = single_bit_mask(cam, 333, 205);
  FrustumParams params;
  params.depth_min_m = 0.5;
  params.depth_max_m = 60.0;

  const auto lifted = lift_mask(mask, cam, points, params);
  REQUIRE(lifted.has_value());
  CHECK(*lifted == std::vector<int>{0});

  params.depth_max_m = 100.0;
  const auto deeper = lift_mask(mask, cam, points, params);
  REQUIRE(deeper.has_value());
  CHECK(*deeper == std::vector<int>{0, 1});

  // Mask bit nowhere near any point: absent.
  const InstanceMask far_mask = single_bit_mask(cam, 5, 5);
  CHECK_FALSE(lift_mask(far_mask, cam, points, params).has_value());
}

TEST_CASE("lift_mask: selected set matches per-point reprojection oracle") {
  const auto cams = make_camera_rig(6, 640, 360, 70.0, 2.5);
  const GtObject obj{Box3({12, 2, 0.8}, 3.5, 1.7, 1.5, 0.3), 1, 0, 60.0};
  Scene scene = build_scene({obj}, {120}, 400, 30.0, 17, cams);
  scene.masks = render_masks(scene);
  const auto points = scene.point_positions();
  FrustumParams params;
  params.depth_min_m = 0.5;
  params.depth_max_m = 36.0;

  for (std::size_t c = 0; c < cams.size(); ++c) {
    for (const InstanceMask& mask : scene.masks[c]) {
      const auto lifted = lift_mask(mask, cams[c], points, params);
      std::vector<int> oracle;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto px = project(points[i], cams[c]);
        if (!px || px->depth < params.depth_min_m ||
            px->depth > params.depth_max_m) {
          continue;
        }
        const int x = static_cast<int>(std::floor(px->u + 0.5));
        const int y = static_cast<int>(std::floor(px->v + 0.5));
        if (mask.bitmap.in_bounds(x, y) && mask.bitmap.get(x, y)) {
          oracle.push_back(static_cast<int>(i));
        }
      }
      if (oracle.empty()) {
        CHECK_FALSE(lifted.has_value());
      } else {
        REQUIRE(lifted.has_value());
        CHECK(*lifted == oracle);
        // The instance's own in-image in-depth points are all selected.
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (scene.points[i].instance_id != obj.instance_id) continue;
          const auto px = project(points[i], cams[c]);
          if (!px || px->depth < params.depth_min_m ||
              px->depth > params.depth_max_m) {
            continue;
          }
          const int x = static_cast<int>(std::floor(px->u + 0.5));
          const int y = static_cast<int>(std::floor(px->v + 0.5));
          if (!mask.bitmap.in_bounds(x, y)) continue;
          CHECK(std::find(lifted->begin(), lifted->end(),
                          static_cast<int>(i)) != lifted->end());
        }
      }
    }
  }
}

TEST_CASE("make_camera_queries: uniform weights give the plain centroid") {
  const CameraModel cam = make_camera(0.0, {0, 0, 1.5});
  std::vector<Vec3> points;
  InstanceMask mask;
  mask.camera_index = 0;
  mask.instance_id = 0;
  mask.class_id = 3;
  mask.bitmap = Bitmap(cam.image_w, cam.image_h);
  for (int k = 0; k < 12; ++k) {
    const int x = 200 + 7 * k;
    const int y = 180 + 3 * k;
    mask.bitmap.set(x, y);
    points.push_back(unproject(x, y, 8.0 + 0.5 * k, cam));
  }
  refresh_mask_bounds(mask);
  const std::vector<double> scores(points.size(), 0.7);
  FrustumParams params;
  params.depth_max_m = 50.0;

  const auto queries =
      make_camera_queries({{mask}}, {cam}, points, scores, params);
  REQUIRE(queries.size() == 1);
  CHECK(queries[0].modality == Modality::kCamera);
  REQUIRE(queries[0].source_box2.has_value());
  CHECK(queries[0].source_box2->camera_index == 0);
  CHECK(queries[0].class_hint == 3);
  Vec3 mean;
  for (const Vec3& p : points) mean += p;
  mean = mean * (1.0 / points.size());
  CHECK((queries[0].position - mean).norm() < 1e-12);
}

TEST_CASE("make_camera_queries: overlap copies and duplication counts") {
  const CameraModel cam = make_camera(0.0, {0, 0, 1.5});
  std::vector<Vec3> points{unproject(300, 200, 10, cam),
                           unproject(310, 200, 10, cam),
                           unproject(320, 200, 10, cam)};
  InstanceMask a = single_bit_mask(cam, 300, 200, 0);
  a.bitmap.set(310, 200);
  refresh_mask_bounds(a);
  InstanceMask b = single_bit_mask(cam, 310, 200, 1);
  b.bitmap.set(320, 200);
  refresh_mask_bounds(b);

  const std::vector<double> scores(points.size(), 1.0);
  FrustumParams params;
  params.depth_max_m = 50.0;
  const auto queries =
      make_camera_queries({{a, b}}, {cam}, points, scores, params);
  REQUIRE(queries.size() == 2);
  CHECK(queries[0].point_indices == std::vector<int>{0, 1});
  CHECK(queries[1].point_indices == std::vector<int>{1, 2});

  // Duplication count of each point equals the number of masks whose set
  // bits contain its projection.
  std::map<int, int> copies;
  for (const auto& q : queries) {
    for (int idx : q.point_indices) ++copies[idx];
  }
  CHECK(copies[0] == 1);
  CHECK(copies[1] == 2);
  CHECK(copies[2] == 1);
}

TEST_CASE("make_camera_queries: score floor keeps centroid on foreground") {
  const CameraModel cam = make_camera(0.0, {0, 0, 1.5});
  std::vector<Vec3> points;
  std::vector<double> scores;
  InstanceMask mask;
  mask.camera_index = 0;
  mask.instance_id = 0;
  mask.class_id = 0;
  mask.bitmap = Bitmap(cam.image_w, cam.image_h);
  // Foreground cluster at 10 m, clutter along the same pixels at depth up
  // to 45 m.
  for (int k = 0; k < 10; ++k) {
    const int x = 250 + 2 * k, y = 190;
    mask.bitmap.set(x, y);
    points.push_back(unproject(x, y, 10.0, cam));
    scores.push_back(1.0);
    points.push_back(unproject(x, y, 25.0 + 2.0 * k, cam));
    scores.push_back(0.0);
  }
  refresh_mask_bounds(mask);
  FrustumParams params;
  params.depth_max_m = 50.0;
  params.score_floor = 1e-3;

  const auto queries =
      make_camera_queries({{mask}}, {cam}, points, scores, params);
  REQUIRE(queries.size() == 1);

  Vec3 fg_centroid;
  Vec3 weighted;
  double wsum = 0.0;
  int fg = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = std::max(params.score_floor, scores[i]);
    weighted += points[i] * w;
    wsum += w;
    if (scores[i] == 1.0) {
      fg_centroid += points[i];
      ++fg;
    }
  }
  fg_centroid = fg_centroid * (1.0 / fg);
  weighted = weighted * (1.0 / wsum);
  CHECK((queries[0].position - weighted).norm() < 1e-12);
  // Within 3 * floor * depth-span of the foreground centroid.
  CHECK((queries[0].position - fg_centroid).norm() <
        3.0 * params.score_floor * params.depth_max_m);
}

TEST_CASE("single-point instances get camera queries but no lidar query") {
  const auto cams = make_camera_rig(6, 640, 360, 70.0, 2.5);
  const GtObject obj{Box3({60, 5, 0.6}, 1.6, 0.6, 1.2, 0.1), 2, 0, 5.0};
  Scene scene = build_scene({obj}, {1}, 0, 60.0, 23, cams);
  scene.masks = render_masks(scene);

  const auto points = scene.point_positions();
  const auto scores = oracle_score(scene, 0.0, 9);
  const auto votes = oracle_vote(scene, points, scores, 0.5, 0.0, 9);
  CHECK(ccl_cluster(votes, points, 0.5, 2).empty());  // lidar path drops it

  FrustumParams params;
  params.depth_max_m = 1.2 * scene.range_m;
  const auto queries =
      make_camera_queries(scene.masks, cams, points, scores, params);
  CHECK(!queries.empty());
}
