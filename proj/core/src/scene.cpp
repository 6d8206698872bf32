#include "sparsefusion/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsefusion/rng.hpp"

namespace sparsefusion {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxPlacementAttempts = 10000;
// Fixed face coordinates are pulled a hair inside the box so containment
// survives the rotation round-trip in point_in_box3.
constexpr double kFaceInset = 1.0 - 1e-9;
// The count formula floors the sensor distance: objects cannot sit inside
// the ego dead zone.
constexpr double kMinSensorDistance = 1.0;
constexpr std::size_t kMaxDenseResample = 200000;

void validate_config(const SceneConfig& cfg) {
  if (!(cfg.range_m > 0.0)) {
    throw std::invalid_argument("SceneConfig: range_m must be positive");
  }
  if (cfg.n_objects < 0) {
    throw std::invalid_argument("SceneConfig: n_objects must be >= 0");
  }
  if (cfg.min_center_gap < 0.0) {
    throw std::invalid_argument("SceneConfig: min_center_gap must be >= 0");
  }
  if (cfg.n_objects > 0 && cfg.classes.empty()) {
    throw std::invalid_argument("SceneConfig: classes required for objects");
  }
  for (const ClassSpec& cs : cfg.classes) {
    if (!(cs.size_prior.x > 0.0 && cs.size_prior.y > 0.0 &&
          cs.size_prior.z > 0.0)) {
      throw std::invalid_argument("ClassSpec: size_prior must be positive");
    }
    if (cs.size_jitter < 0.0 || cs.size_jitter > 0.5) {
      throw std::invalid_argument("ClassSpec: size_jitter outside [0, 0.5]");
    }
    if (!(cs.surface_point_rate > 0.0)) {
      throw std::invalid_argument("ClassSpec: surface_point_rate must be > 0");
    }
  }
  for (const CameraModel& cam : cfg.cameras) cam.validate();
}

double visible_surface_area(const Box3& b) {
  // Five faces: two x-normal (l*h), two y-normal (w*h), the top (w*l).
  return 2.0 * b.l * b.h + 2.0 * b.w * b.h + b.w * b.l;
}

// Uniform sample over the five visible faces, in world coordinates.
Vec3 sample_surface_point(const Box3& b, std::mt19937_64& rng) {
  const double ax = b.l * b.h;  // each x-normal face
  const double ay = b.w * b.h;  // each y-normal face
  const double az = b.w * b.l;  // top
  const double total = 2.0 * ax + 2.0 * ay + az;
  std::uniform_real_distribution<double> pick(0.0, total);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  double r = pick(rng);
  double lx, ly, lz;
  if (r < ax) {
    lx = 0.5 * b.w * kFaceInset;
    ly = unit(rng) * b.l;
    lz = unit(rng) * b.h;
  } else if (r < 2.0 * ax) {
    lx = -0.5 * b.w * kFaceInset;
    ly = unit(rng) * b.l;
    lz = unit(rng) * b.h;
  } else if (r < 2.0 * ax + ay) {
    lx = unit(rng) * b.w;
    ly = 0.5 * b.l * kFaceInset;
    lz = unit(rng) * b.h;
  } else if (r < 2.0 * (ax + ay)) {
    lx = unit(rng) * b.w;
    ly = -0.5 * b.l * kFaceInset;
    lz = unit(rng) * b.h;
  } else {
    lx = unit(rng) * b.w;
    ly = unit(rng) * b.l;
    lz = 0.5 * b.h * kFaceInset;
  }
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  return {b.center.x + c * lx - s * ly, b.center.y + s * lx + c * ly,
          b.center.z + lz};
}

bool round_to_pixel(const PixelPoint& px, int image_w, int image_h, int& x,
                    int& y) {
  // Nearest pixel, ties toward +inf; identical to the lift rule.
  x = static_cast<int>(std::floor(px.u + 0.5));
  y = static_cast<int>(std::floor(px.v + 0.5));
  return x >= 0 && x < image_w && y >= 0 && y < image_h;
}

}  // namespace

std::size_t expected_surface_point_count(const Box3& box, double rate,
                                         double attenuation_exp) {
  const double dist = std::max(box.center.norm(), kMinSensorDistance);
  const double expected =
      visible_surface_area(box) * rate * std::pow(10.0 / dist, attenuation_exp);
  const long long n = std::llround(expected);
  return n > 0 ? static_cast<std::size_t>(n) : 0;
}

std::vector<Vec3> Scene::point_positions() const {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const ScenePoint& p : points) out.push_back(p.position);
  return out;
}

std::vector<CameraModel> make_camera_rig(int n_cameras, int image_w,
                                         int image_h, double hfov_deg,
                                         double height_m) {
  if (n_cameras <= 0) throw std::invalid_argument("rig: n_cameras must be > 0");
  const double f =
      0.5 * image_w / std::tan(0.5 * hfov_deg * kPi / 180.0);
  std::vector<CameraModel> rig;
  rig.reserve(n_cameras);
  for (int k = 0; k < n_cameras; ++k) {
    const double heading = 2.0 * kPi * k / n_cameras;
    const double ch = std::cos(heading);
    const double sh = std::sin(heading);
    CameraModel cam;
    cam.fx = f;
    cam.fy = f;
    cam.cx = 0.5 * image_w;
    cam.cy = 0.5 * image_h;
    cam.image_w = image_w;
    cam.image_h = image_h;
    // Camera frame: x right, y down, z along the heading.
    cam.world_to_cam_rotation.m = {sh, -ch, 0, 0, 0, -1, ch, sh, 0};
    const Vec3 position{0.0, 0.0, height_m};
    cam.world_to_cam_translation =
        (cam.world_to_cam_rotation * position) * -1.0;
    cam.validate();
    rig.push_back(cam);
  }
  return rig;
}

Scene generate_scene(const SceneConfig& cfg) {
  validate_config(cfg);
  Scene scene;
  scene.range_m = cfg.range_m;
  scene.seed = cfg.seed;
  scene.cameras = cfg.cameras;
  scene.masks.resize(cfg.cameras.size());

  for (int i = 0; i < cfg.n_objects; ++i) {
    auto rng = make_rng(cfg.seed, RngStream::kPlacement, i);
    std::uniform_int_distribution<std::size_t> pick_class(
        0, cfg.classes.size() - 1);
    const ClassSpec& cls = cfg.classes[pick_class(rng)];
    std::uniform_real_distribution<double> jitter(-cls.size_jitter,
                                                  cls.size_jitter);
    const double w = cls.size_prior.x * (1.0 + jitter(rng));
    const double l = cls.size_prior.y * (1.0 + jitter(rng));
    const double h = cls.size_prior.z * (1.0 + jitter(rng));
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    const double yaw = wrap_angle(angle(rng));
    std::uniform_real_distribution<double> coord(-cfg.range_m, cfg.range_m);

    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
      const double x = coord(rng);
      const double y = coord(rng);
      bool ok = true;
      if (cfg.min_center_gap > 0.0) {
        for (const GtObject& other : scene.gt) {
          const double dx = x - other.box.center.x;
          const double dy = y - other.box.center.y;
          if (std::sqrt(dx * dx + dy * dy) < cfg.min_center_gap) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        scene.gt.push_back({Box3({x, y, 0.5 * h}, w, l, h, yaw), cls.class_id,
                            i, cls.surface_point_rate});
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw std::runtime_error(
          "generate_scene: min_center_gap=" +
          std::to_string(cfg.min_center_gap) + " unsatisfiable for object " +
          std::to_string(i) + " after 10000 attempts");
    }

    const GtObject& obj = scene.gt.back();
    const std::size_t n_points = expected_surface_point_count(
        obj.box, cls.surface_point_rate, cfg.distance_attenuation_exp);
    auto surf_rng = make_rng(cfg.seed, RngStream::kSurfacePoints, i);
    auto drop_rng = make_rng(cfg.seed, RngStream::kPointDropout, i);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t k = 0; k < n_points; ++k) {
      const Vec3 p = sample_surface_point(obj.box, surf_rng);
      if (cfg.point_dropout > 0.0 && u01(drop_rng) < cfg.point_dropout) {
        continue;
      }
      scene.points.push_back({p, i});
    }
  }

  auto bg_rng = make_rng(cfg.seed, RngStream::kBackground);
  std::uniform_real_distribution<double> coord(-cfg.range_m, cfg.range_m);
  std::uniform_real_distribution<double> ground(-0.2, 0.2);
  for (int k = 0; k < cfg.background_points; ++k) {
    const double x = coord(bg_rng);
    const double y = coord(bg_rng);
    const double z = ground(bg_rng);
    scene.points.push_back({{x, y, z}, kBackgroundId});
  }
  return scene;
}

bool refresh_mask_bounds(InstanceMask& mask) {
  int lo_x, lo_y, hi_x, hi_y;
  if (!mask.bitmap.tight_bounds(lo_x, lo_y, hi_x, hi_y)) return false;
  // Pixel-extent convention: pixel x covers [x - 0.5, x + 0.5) in
  // continuous image coordinates under the round-half-up lift rule.
  mask.bbox2 = {lo_x - 0.5, lo_y - 0.5, hi_x + 0.5, hi_y + 0.5};
  return true;
}

std::vector<std::vector<InstanceMask>> render_masks(const Scene& scene) {
  std::vector<std::vector<InstanceMask>> out(scene.cameras.size());
  if (scene.gt.empty()) return out;

  // One dense resample per instance, shared across cameras. The resample
  // includes the instance's own points, so every in-image return is
  // guaranteed to land on a set bit of its mask.
  std::vector<std::vector<Vec3>> resamples(scene.gt.size());
  for (std::size_t i = 0; i < scene.gt.size(); ++i) {
    const GtObject& obj = scene.gt[i];
    const double area = visible_surface_area(obj.box);
    // 20x the class surface rate is the floor; near objects with large
    // image footprints get the same distance boost the LiDAR applies,
    // capped to bound rendering cost.
    const double base = std::ceil(area * 20.0 * obj.point_rate);
    const double dist = std::max(obj.box.center.norm(), kMinSensorDistance);
    const double boost = std::max(1.0, std::pow(10.0 / dist, 2.0));
    const std::size_t n_dense = static_cast<std::size_t>(std::max(
        base,
        std::min(static_cast<double>(kMaxDenseResample), base * boost)));
    auto rng = make_rng(scene.seed, RngStream::kMaskResample, i);
    auto& samples = resamples[i];
    samples.reserve(n_dense);
    for (std::size_t k = 0; k < n_dense; ++k) {
      samples.push_back(sample_surface_point(obj.box, rng));
    }
  }
  std::vector<std::vector<Vec3>> own_points(scene.gt.size());
  for (const ScenePoint& p : scene.points) {
    if (p.instance_id >= 0) own_points[p.instance_id].push_back(p.position);
  }

  for (std::size_t c = 0; c < scene.cameras.size(); ++c) {
    const CameraModel& cam = scene.cameras[c];
    for (std::size_t i = 0; i < scene.gt.size(); ++i) {
      // A mask exists only if at least one actual return is in-image.
      bool visible = false;
      for (const Vec3& p : own_points[i]) {
        const auto px = project(p, cam);
        int x, y;
        if (px && round_to_pixel(*px, cam.image_w, cam.image_h, x, y)) {
          visible = true;
          break;
        }
      }
      if (!visible) continue;

      InstanceMask mask;
      mask.camera_index = static_cast<int>(c);
      mask.instance_id = scene.gt[i].instance_id;
      mask.class_id = scene.gt[i].class_id;
      mask.bitmap = Bitmap(cam.image_w, cam.image_h);
      auto rasterize = [&](const Vec3& p) {
        const auto px = project(p, cam);
        int x, y;
        if (px && round_to_pixel(*px, cam.image_w, cam.image_h, x, y)) {
          mask.bitmap.set(x, y);
        }
      };
      for (const Vec3& p : resamples[i]) rasterize(p);
      for (const Vec3& p : own_points[i]) rasterize(p);
      mask.bitmap.dilate(1);
      mask.bitmap.erode(1);
      if (refresh_mask_bounds(mask)) out[c].push_back(std::move(mask));
    }
  }
  return out;
}

std::vector<std::vector<InstanceMask>> apply_mask_noise(
    const std::vector<std::vector<InstanceMask>>& masks, const MaskNoise& noise,
    std::uint64_t seed) {
  std::vector<std::vector<InstanceMask>> out(masks.size());
  for (std::size_t c = 0; c < masks.size(); ++c) {
    auto drop_rng = make_rng(seed, RngStream::kMaskDrop, c);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (const InstanceMask& mask : masks[c]) {
      if (u01(drop_rng) < noise.drop_prob) continue;
      InstanceMask edited = mask;
      if (noise.dilate_px > 0) edited.bitmap.dilate(noise.dilate_px);
      if (noise.erode_px > 0) edited.bitmap.erode(noise.erode_px);
      if (refresh_mask_bounds(edited)) out[c].push_back(std::move(edited));
    }

    // Spurious injection needs image dims, so a camera with no input
    // masks at all is skipped.
    auto spur_rng = make_rng(seed, RngStream::kMaskSpurious, c);
    if (!masks[c].empty() && u01(spur_rng) < noise.spurious_prob) {
      const int image_w = masks[c][0].bitmap.width();
      const int image_h = masks[c][0].bitmap.height();
      if (image_w > 8 && image_h > 8) {
        std::uniform_int_distribution<int> rw(4, std::max(4, image_w / 4));
        std::uniform_int_distribution<int> rh(4, std::max(4, image_h / 4));
        const int bw = rw(spur_rng);
        const int bh = rh(spur_rng);
        std::uniform_int_distribution<int> rx(0, image_w - bw - 1);
        std::uniform_int_distribution<int> ry(0, image_h - bh - 1);
        const int x0 = rx(spur_rng);
        const int y0 = ry(spur_rng);
        std::uniform_int_distribution<std::size_t> pick_class(
            0, masks[c].size() - 1);
        InstanceMask spur;
        spur.camera_index = static_cast<int>(c);
        spur.instance_id = kBackgroundId;
        spur.class_id = masks[c][pick_class(spur_rng)].class_id;
        spur.bitmap = Bitmap(image_w, image_h);
        for (int y = y0; y < y0 + bh; ++y) {
          for (int x = x0; x < x0 + bw; ++x) spur.bitmap.set(x, y);
        }
        if (refresh_mask_bounds(spur)) out[c].push_back(std::move(spur));
      }
    }

    auto merge_rng = make_rng(seed, RngStream::kMaskMerge, c);
    if (out[c].size() >= 2 && u01(merge_rng) < noise.merge_prob) {
      std::uniform_int_distribution<std::size_t> pick(0, out[c].size() - 1);
      std::size_t a = pick(merge_rng);
      std::size_t b = a;
      for (int tries = 0; tries < 16 && b == a; ++tries) b = pick(merge_rng);
      if (a != b) {
        if (a > b) std::swap(a, b);
        out[c][a].bitmap.union_with(out[c][b].bitmap);
        refresh_mask_bounds(out[c][a]);
        out[c].erase(out[c].begin() + static_cast<std::ptrdiff_t>(b));
      }
    }
  }
  return out;
}

}  // namespace sparsefusion
