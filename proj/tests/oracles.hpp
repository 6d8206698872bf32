// Test-only reference implementations. Each oracle takes an independent
// route from the code under test: homogeneous 4x4 projection, half-space
// containment from corners, raster counting for areas, brute-force O(n^2)
// clustering/matching. Nothing in here is allowed to call the
// implementation it checks.
#pragma once

#include <vector>

#include "sparsefusion/assign.hpp"
#include "sparsefusion/eval.hpp"
#include "sparsefusion/geom.hpp"
#include "sparsefusion/lidar_query.hpp"
#include "sparsefusion/refine.hpp"

namespace sparsefusion::testing {

// Pinhole projection through an explicit 4x4 homogeneous matrix product.
std::optional<PixelPoint> project_homogeneous(const Vec3& p,
                                              const CameraModel& cam);

// Containment as intersection of the six half-spaces derived from
// box3_corners (normals from corner differences, offsets from corner
// dot products).
bool point_in_box3_halfspace(const Vec3& p, const Box3& b);

// Cell-center counting over an n x n raster spanning the joint bounds.
double iou2d_raster(const Box2& a, const Box2& b, int n);

// Volume IoU by voxel counting at the given resolution.
double box3_volume_iou(const Box3& a, const Box3& b, double resolution);

// Connected components via the full O(n^2) distance matrix; returns the
// partition as sorted groups of vote point_indices, groups sorted by
// first member. Components below min_cluster_points are dropped.
std::vector<std::vector<int>> ccl_brute_force(const std::vector<Vote>& votes,
                                              double connect_radius_m,
                                              std::size_t min_cluster_points);

// Canonical form of ccl_cluster output for comparison with the oracle.
std::vector<std::vector<int>> partition_of(const std::vector<Cluster>& cl);

// Straightforward quadratic greedy duplicate suppression.
std::vector<Detection> dedup_brute_force(const std::vector<Detection>& dets,
                                         double bev_center_dist_m);

// Independent focal loss evaluation (same definition, separate code).
double focal_reference(const std::vector<double>& probs,
                       const std::vector<int>& labels, double alpha,
                       double gamma);

// Independent mean-AP evaluation at one threshold: per class, greedy
// score-descending nearest matching, 100-point interpolated AP.
double mean_ap_reference(
    const std::vector<std::vector<Detection>>& per_scene_dets,
    const std::vector<std::vector<GtObject>>& per_scene_gts,
    double threshold_m);

}  // namespace sparsefusion::testing
