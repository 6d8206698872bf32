// End-to-end detection over one scene: scoring, voting, clustering, mask
// lifting, bi-modal refinement, optional assignment gating and duplicate
// suppression. Everything is deterministic given (config, scene).
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sparsefusion/assign.hpp"
#include "sparsefusion/camera_query.hpp"
#include "sparsefusion/lidar_query.hpp"
#include "sparsefusion/refine.hpp"
#include "sparsefusion/scene.hpp"

namespace sparsefusion {

// Oracle diagnostic: suppress detections whose refinement-stage assignment
// (reference-box center in 3D, source 2D box in round two) is negative,
// emulating a head trained under that assignment regime.
enum class AssignmentGate { kOff, kQueryInBox, kTwoRound };

struct PipelineConfig {
  Vec3 voxel_size{0.2, 0.2, 0.2};
  double connect_radius_m = 0.5;
  std::size_t min_cluster_points = 2;
  double fg_threshold = 0.5;
  double flip_prob = 0.0;
  double vote_sigma_m = 0.0;
  double frustum_depth_min_m = 0.5;
  double frustum_depth_max_m = 0.0;  // <= 0: auto, 1.2 x scene range
  double score_floor = 1e-3;
  double iou2d_threshold = 0.5;
  double dedup_dist_m = 1.0;
  std::vector<double> eval_thresholds_m{0.5, 1.0, 2.0, 4.0};
  bool use_lidar_queries = true;
  bool use_camera_queries = true;
  AssignmentGate assignment_gate = AssignmentGate::kOff;
  MaskNoise mask_noise;
  std::uint64_t seed = 0;

  void validate() const;
  FrustumParams frustum_params(double scene_range_m) const;
};

// Optional deterministic drop-ins for the geometric box predictors.
struct PipelineHooks {
  ReferencePredictorFn reference_predictor;
  FinalPredictorFn final_predictor;
};

struct PipelineStats {
  std::size_t n_points = 0;
  std::size_t n_voxels = 0;
  std::size_t n_votes = 0;
  std::size_t n_lidar_queries = 0;
  std::size_t n_camera_queries = 0;
  std::size_t query_member_total = 0;  // sum of query sizes, copies included
  std::size_t n_detections_pre_dedup = 0;
  std::size_t n_detections = 0;

  std::size_t sparse_live() const {
    return n_points + n_votes + query_member_total;
  }
};

struct QueryRecord {
  Query query;
  Box3 reference_box;
  Query aligned;
  Detection detection;
};

struct SceneResult {
  std::vector<double> scores;
  std::vector<Vote> votes;
  std::vector<QueryRecord> records;
  Assignment generation_assignment;  // keyed on query positions
  Assignment refinement_assignment;  // keyed on reference-box centers
  std::vector<Detection> detections;
  PipelineStats stats;
  LossBreakdown losses;
};

SceneResult run_scene_pipeline(const Scene& scene,
                               const std::vector<ClassSpec>& classes,
                               const PipelineConfig& cfg,
                               const PipelineHooks& hooks = {});

}  // namespace sparsefusion
