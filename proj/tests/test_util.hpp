// Shared generators for randomized tests. All draws go through an
// explicit engine so every test is reproducible.
#pragma once

#include <random>

#include "sparsefusion/geom.hpp"
#include "sparsefusion/scene.hpp"

namespace sparsefusion::testing {

inline Box3 random_box(std::mt19937_64& rng, double span = 20.0) {
  std::uniform_real_distribution<double> pos(-span, span);
  std::uniform_real_distribution<double> dim(0.3, 6.0);
  std::uniform_real_distribution<double> angle(-3.14159265358979, 3.14159265358979);
  return Box3({pos(rng), pos(rng), pos(rng)}, dim(rng), dim(rng), dim(rng),
              angle(rng));
}

inline Vec3 random_point(std::mt19937_64& rng, double span = 25.0) {
  std::uniform_real_distribution<double> pos(-span, span);
  return {pos(rng), pos(rng), pos(rng)};
}

// A camera at `position` looking along +x rotated by heading about z.
inline CameraModel make_camera(double heading = 0.0,
                               const Vec3& position = {0, 0, 1.5},
                               int image_w = 640, int image_h = 480,
                               double f = 500.0) {
  CameraModel cam;
  cam.fx = f;
  cam.fy = f;
  cam.cx = image_w / 2.0;
  cam.cy = image_h / 2.0;
  cam.image_w = image_w;
  cam.image_h = image_h;
  const double ch = std::cos(heading);
  const double sh = std::sin(heading);
  cam.world_to_cam_rotation.m = {sh, -ch, 0, 0, 0, -1, ch, sh, 0};
  cam.world_to_cam_translation = (cam.world_to_cam_rotation * position) * -1.0;
  cam.validate();
  return cam;
}

// Uniform samples on the five visible faces of a box (test-side sampler,
// independent of the generator in scene.cpp).
inline std::vector<Vec3> sample_box_surface(const Box3& b, std::size_t n,
                                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const double ax = b.l * b.h, ay = b.w * b.h, az = b.w * b.l;
  const double total = 2 * ax + 2 * ay + az;
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = u01(rng) * total;
    double lx, ly, lz;
    const double inset = 1.0 - 1e-9;
    if (r < 2 * ax) {
      lx = (r < ax ? 0.5 : -0.5) * b.w * inset;
      ly = unit(rng) * b.l;
      lz = unit(rng) * b.h;
    } else if (r < 2 * ax + 2 * ay) {
      lx = unit(rng) * b.w;
      ly = (r < 2 * ax + ay ? 0.5 : -0.5) * b.l * inset;
      lz = unit(rng) * b.h;
    } else {
      lx = unit(rng) * b.w;
      ly = unit(rng) * b.l;
      lz = 0.5 * b.h * inset;
    }
    const double c = std::cos(b.yaw), s = std::sin(b.yaw);
    out.push_back({b.center.x + c * lx - s * ly, b.center.y + s * lx + c * ly,
                   b.center.z + lz});
  }
  return out;
}

// Hand-built scene: boxes with per-object point counts, optional
// background points, using the surround rig.
inline Scene build_scene(const std::vector<GtObject>& objects,
                         const std::vector<std::size_t>& points_per_object,
                         std::size_t background_points, double range_m,
                         std::uint64_t seed,
                         std::vector<CameraModel> cameras) {
  Scene scene;
  scene.gt = objects;
  scene.range_m = range_m;
  scene.seed = seed;
  scene.cameras = std::move(cameras);
  scene.masks.resize(scene.cameras.size());
  std::mt19937_64 rng(seed * 7919 + 13);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    for (const Vec3& p :
         sample_box_surface(objects[i].box, points_per_object[i], rng)) {
      scene.points.push_back({p, objects[i].instance_id});
    }
  }
  std::uniform_real_distribution<double> coord(-range_m, range_m);
  std::uniform_real_distribution<double> ground(-0.2, 0.2);
  for (std::size_t k = 0; k < background_points; ++k) {
    scene.points.push_back({{coord(rng), coord(rng), ground(rng)},
                            kBackgroundId});
  }
  return scene;
}

}  // namespace sparsefusion::testing
