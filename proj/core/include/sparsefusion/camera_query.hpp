// Camera-side query generation: lift 2D instance masks to frustum point
// clusters. Points falling in overlapping frustums are copied into every
// owning query; query positions are foreground-score-weighted centroids.
#pragma once

#include <optional>
#include <vector>

#include "sparsefusion/geom.hpp"
#include "sparsefusion/query.hpp"
#include "sparsefusion/scene.hpp"

namespace sparsefusion {

struct FrustumParams {
  double depth_min_m = 0.5;
  double depth_max_m = 100.0;
  double score_floor = 1e-3;  // weight floor for the centroid

  void validate() const;
};

// Indices of points whose projection rounds onto a set bit of the mask
// (nearest pixel, ties toward +inf) with depth inside
// [depth_min, depth_max]; absent when no point qualifies.
std::optional<std::vector<int>> lift_mask(const InstanceMask& mask,
                                          const CameraModel& cam,
                                          const std::vector<Vec3>& points,
                                          const FrustumParams& params);

// One query per non-empty lifted mask, iterating cameras then masks in
// order. Position is sum(w_i p_i) / sum(w_i) with
// w_i = max(score_floor, score_i).
std::vector<Query> make_camera_queries(
    const std::vector<std::vector<InstanceMask>>& masks,
    const std::vector<CameraModel>& cameras, const std::vector<Vec3>& points,
    const std::vector<double>& scores, const FrustumParams& params);

}  // namespace sparsefusion
