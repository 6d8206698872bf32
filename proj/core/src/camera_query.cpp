#include "sparsefusion/camera_query.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsefusion {

void FrustumParams::validate() const {
  if (!(depth_min_m > 0.0) || !(depth_max_m > depth_min_m)) {
    throw std::invalid_argument("FrustumParams: need 0 < depth_min < depth_max");
  }
  if (!(score_floor > 0.0)) {
    throw std::invalid_argument("FrustumParams: score_floor must be positive");
  }
}

std::optional<std::vector<int>> lift_mask(const InstanceMask& mask,
                                          const CameraModel& cam,
                                          const std::vector<Vec3>& points,
                                          const FrustumParams& params) {
  params.validate();
  std::vector<int> selected;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto px = project(points[i], cam);
    if (!px) continue;
    if (px->depth < params.depth_min_m || px->depth > params.depth_max_m) {
      continue;
    }
    const int x = static_cast<int>(std::floor(px->u + 0.5));
    const int y = static_cast<int>(std::floor(px->v + 0.5));
    if (!mask.bitmap.in_bounds(x, y)) continue;
    if (mask.bitmap.get(x, y)) selected.push_back(static_cast<int>(i));
  }
  if (selected.empty()) return std::nullopt;
  return selected;
}

std::vector<Query> make_camera_queries(
    const std::vector<std::vector<InstanceMask>>& masks,
    const std::vector<CameraModel>& cameras, const std::vector<Vec3>& points,
    const std::vector<double>& scores, const FrustumParams& params) {
  if (scores.size() != points.size()) {
    throw std::invalid_argument(
        "make_camera_queries: scores must cover all points");
  }
  std::vector<Query> queries;
  for (std::size_t c = 0; c < masks.size(); ++c) {
    if (c >= cameras.size()) {
      throw std::invalid_argument("make_camera_queries: missing camera");
    }
    for (const InstanceMask& mask : masks[c]) {
      auto lifted = lift_mask(mask, cameras[c], points, params);
      if (!lifted) continue;
      Query q;
      q.point_indices = std::move(*lifted);
      q.modality = Modality::kCamera;
      q.source_box2 = QuerySourceBox{static_cast<int>(c), mask.bbox2};
      q.class_hint = mask.class_id;
      Vec3 weighted_sum;
      double weight_total = 0.0;
      for (int idx : q.point_indices) {
        const double w = std::max(params.score_floor, scores[idx]);
        weighted_sum += points[idx] * w;
        weight_total += w;
      }
      q.position = weighted_sum * (1.0 / weight_total);
      queries.push_back(std::move(q));
    }
  }
  return queries;
}

}  // namespace sparsefusion
