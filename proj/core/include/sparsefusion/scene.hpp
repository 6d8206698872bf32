// Deterministic synthetic scenes: ground-truth boxes, surface-sampled
// LiDAR returns, a surround camera rig and oracle per-camera instance
// masks. Scenes are pure functions of (config, seed); per-object RNG
// streams are split so that adding an object leaves every other object's
// samples untouched (see rng.hpp).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsefusion/bitmap.hpp"
#include "sparsefusion/geom.hpp"

namespace sparsefusion {

// Background points and spurious masks carry this instance id.
inline constexpr int kBackgroundId = -1;

struct ClassSpec {
  int class_id = 0;
  std::string name;
  Vec3 size_prior{1.0, 1.0, 1.0};  // (w, l, h); w is the extent along yaw
  double size_jitter = 0.0;        // fraction in [0, 0.5]
  double surface_point_rate = 10;  // points per m^2 at 10 m reference
};

struct SceneConfig {
  double range_m = 54.0;  // half-extent of the square area
  int n_objects = 0;
  std::vector<ClassSpec> classes;
  std::vector<CameraModel> cameras;
  int background_points = 0;
  double point_dropout = 0.0;
  double distance_attenuation_exp = 2.0;
  double min_center_gap = 0.0;  // BEV gap between object centers; 0 allows crowding
  std::uint64_t seed = 0;
};

struct GtObject {
  Box3 box;
  int class_id = 0;
  int instance_id = 0;
  double point_rate = 10.0;  // surface_point_rate of the spawning class
};

struct ScenePoint {
  Vec3 position;
  int instance_id = kBackgroundId;
};

struct InstanceMask {
  int camera_index = 0;
  int instance_id = kBackgroundId;  // kBackgroundId marks a spurious mask
  int class_id = 0;
  Bitmap bitmap;
  Box2 bbox2;  // tight bounds of set bits, kept in sync by every edit

  bool spurious() const { return instance_id == kBackgroundId; }
};

struct Scene {
  std::vector<GtObject> gt;
  std::vector<ScenePoint> points;
  std::vector<CameraModel> cameras;
  std::vector<std::vector<InstanceMask>> masks;  // per camera
  double range_m = 0.0;
  std::uint64_t seed = 0;

  std::vector<Vec3> point_positions() const;
};

struct MaskNoise {
  double drop_prob = 0.0;
  int dilate_px = 0;
  int erode_px = 0;
  double spurious_prob = 0.0;
  double merge_prob = 0.0;

  bool is_identity() const {
    return drop_prob == 0.0 && dilate_px == 0 && erode_px == 0 &&
           spurious_prob == 0.0 && merge_prob == 0.0;
  }
};

// Surround rig of n cameras at the area center, evenly spaced headings.
std::vector<CameraModel> make_camera_rig(int n_cameras, int image_w,
                                         int image_h, double hfov_deg,
                                         double height_m);

// round(visible surface area * rate * (10 / center distance)^attenuation),
// distance floored at 1 m (ego dead zone). The count generate_scene draws
// for an object before dropout.
std::size_t expected_surface_point_count(const Box3& box, double rate,
                                         double attenuation_exp);

// Generates ground truth and LiDAR points; masks are left empty (call
// render_masks). Per-object point count is
//   round(visible surface area * rate * (10 / center distance)^attenuation)
// sampled uniformly over the five visible faces (no bottom). Throws
// std::runtime_error when min_center_gap cannot be honored within 10000
// placement attempts.
Scene generate_scene(const SceneConfig& cfg);

// Oracle 2D instance segmentation: for every camera and every instance
// with at least one in-image point, rasterizes a dense resample (>= 20x
// the surface rate, plus the instance's own points) and closes the result
// with a 3x3 kernel. No occlusion culling between instances.
std::vector<std::vector<InstanceMask>> render_masks(const Scene& scene);

// Degrades masks: independent drops, dilation then erosion, spurious
// rectangle injection per camera, and same-camera pair merges. Masks
// emptied by erosion are removed; bbox2 is recomputed after every edit.
std::vector<std::vector<InstanceMask>> apply_mask_noise(
    const std::vector<std::vector<InstanceMask>>& masks, const MaskNoise& noise,
    std::uint64_t seed);

// Recomputes bbox2 from the bitmap; false when the bitmap is empty.
bool refresh_mask_bounds(InstanceMask& mask);

}  // namespace sparsefusion
