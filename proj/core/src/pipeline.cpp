#include "sparsefusion/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsefusion/rng.hpp"

namespace sparsefusion {

namespace {

// GT box index containing p, nearest center wins; kNegative when outside.
int containing_gt(const Vec3& p, const std::vector<GtObject>& gt) {
  int best = kNegative;
  double best_dist = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!point_in_box3(p, gt[i].box)) continue;
    const double d = (p - gt[i].box.center).norm();
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

double clamp_prob(double p) { return std::clamp(p, 1e-7, 1.0 - 1e-7); }

double mean_member_score(const Query& q, const std::vector<double>& scores) {
  double sum = 0.0;
  for (int idx : q.point_indices) sum += scores[idx];
  return sum / static_cast<double>(q.point_indices.size());
}

// Mean L1 regression loss over the positively assigned queries of one
// modality (or all, when modality is nullopt): predicted box vs assigned
// GT, both encoded against the given anchors.
double stage_reg_loss(const std::vector<QueryRecord>& records,
                      const Assignment& assignment,
                      const std::vector<GtObject>& gt,
                      std::optional<Modality> modality, bool use_final_box) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (assignment.gt_index[i] == kNegative) continue;
    if (modality && records[i].query.modality != *modality) continue;
    const Box3& gt_box = gt[assignment.gt_index[i]].box;
    const Vec3 anchor = use_final_box ? records[i].reference_box.center
                                      : records[i].query.position;
    const Box3& pred =
        use_final_box ? records[i].detection.box : records[i].reference_box;
    sum += l1_loss(encode_target(pred, anchor), encode_target(gt_box, anchor));
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

double stage_cls_loss(const std::vector<QueryRecord>& records,
                      const Assignment& assignment,
                      const std::vector<double>& scores,
                      std::optional<Modality> modality, bool use_final_score) {
  std::vector<double> probs;
  std::vector<int> labels;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (modality && records[i].query.modality != *modality) continue;
    probs.push_back(clamp_prob(use_final_score
                                   ? records[i].detection.score
                                   : mean_member_score(records[i].query,
                                                       scores)));
    labels.push_back(assignment.gt_index[i] != kNegative ? 1 : 0);
  }
  return focal_loss(probs, labels);
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(voxel_size.x > 0 && voxel_size.y > 0 && voxel_size.z > 0)) {
    throw std::invalid_argument("PipelineConfig: voxel_size must be positive");
  }
  if (!(connect_radius_m > 0)) {
    throw std::invalid_argument(
        "PipelineConfig: connect_radius_m must be positive");
  }
  if (flip_prob < 0 || flip_prob > 1) {
    throw std::invalid_argument("PipelineConfig: flip_prob outside [0, 1]");
  }
  if (vote_sigma_m < 0) {
    throw std::invalid_argument("PipelineConfig: vote_sigma_m must be >= 0");
  }
  if (!(frustum_depth_min_m > 0)) {
    throw std::invalid_argument(
        "PipelineConfig: frustum_depth_min_m must be positive");
  }
  if (!(score_floor > 0)) {
    throw std::invalid_argument("PipelineConfig: score_floor must be positive");
  }
  if (iou2d_threshold < 0 || iou2d_threshold > 1) {
    throw std::invalid_argument(
        "PipelineConfig: iou2d_threshold outside [0, 1]");
  }
  if (!(dedup_dist_m > 0)) {
    throw std::invalid_argument(
        "PipelineConfig: dedup_dist_m must be positive");
  }
  if (!std::is_sorted(eval_thresholds_m.begin(), eval_thresholds_m.end())) {
    throw std::invalid_argument(
        "PipelineConfig: eval_thresholds_m must be ascending");
  }
}

FrustumParams PipelineConfig::frustum_params(double scene_range_m) const {
  FrustumParams params;
  params.depth_min_m = frustum_depth_min_m;
  params.depth_max_m = frustum_depth_max_m > 0.0 ? frustum_depth_max_m
                                                 : 1.2 * scene_range_m;
  params.score_floor = score_floor;
  return params;
}

SceneResult run_scene_pipeline(const Scene& scene,
                               const std::vector<ClassSpec>& classes,
                               const PipelineConfig& cfg,
                               const PipelineHooks& hooks) {
  cfg.validate();
  SceneResult result;
  const std::vector<Vec3> points = scene.point_positions();
  const std::uint64_t base =
      split_seed(cfg.seed, RngStream::kSceneIndex, scene.seed);

  const VoxelGrid grid = voxelize(points, cfg.voxel_size, Vec3{});
  result.scores = oracle_score(scene, cfg.flip_prob, base);
  result.votes = oracle_vote(scene, points, result.scores, cfg.fg_threshold,
                             cfg.vote_sigma_m, base);

  std::vector<Query> queries;
  std::size_t n_lidar = 0;
  if (cfg.use_lidar_queries) {
    const auto clusters = ccl_cluster(result.votes, points,
                                      cfg.connect_radius_m,
                                      cfg.min_cluster_points);
    auto lidar_queries = make_lidar_queries(clusters, points);
    n_lidar = lidar_queries.size();
    for (auto& q : lidar_queries) queries.push_back(std::move(q));
  }
  std::size_t n_camera = 0;
  if (cfg.use_camera_queries && !scene.cameras.empty()) {
    const auto masks = cfg.mask_noise.is_identity()
                           ? scene.masks
                           : apply_mask_noise(scene.masks, cfg.mask_noise,
                                              base);
    auto camera_queries =
        make_camera_queries(masks, scene.cameras, points, result.scores,
                            cfg.frustum_params(scene.range_m));
    n_camera = camera_queries.size();
    for (auto& q : camera_queries) queries.push_back(std::move(q));
  }

  result.records.reserve(queries.size());
  for (Query& q : queries) {
    QueryRecord rec;
    rec.query = std::move(q);
    if (hooks.reference_predictor) {
      rec.reference_box = hooks.reference_predictor(
          extract_features(rec.query, points, result.scores), points);
    } else {
      rec.reference_box = predict_reference_box(rec.query, points);
    }
    rec.aligned = align_query(rec.query, rec.reference_box, points);
    if (hooks.final_predictor) {
      Detection det;
      det.box = hooks.final_predictor(
          extract_features(rec.aligned, points, result.scores), points);
      const Detection defaulted =
          predict_final(rec.aligned, points, result.scores, classes);
      det.class_id = defaulted.class_id;
      det.score = defaulted.score;
      det.provenance = defaulted.provenance;
      rec.detection = det;
    } else {
      rec.detection = predict_final(rec.aligned, points, result.scores,
                                    classes);
    }
    result.records.push_back(std::move(rec));
  }

  std::vector<Box3> gt_boxes;
  gt_boxes.reserve(scene.gt.size());
  for (const GtObject& g : scene.gt) gt_boxes.push_back(g.box);

  std::vector<Query> gen_stage(result.records.size());
  std::vector<Query> ref_stage(result.records.size());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    gen_stage[i] = result.records[i].query;
    ref_stage[i] = result.records[i].query;
    ref_stage[i].position = result.records[i].reference_box.center;
  }
  result.generation_assignment =
      two_round(gen_stage, gt_boxes, scene.cameras, cfg.iou2d_threshold);
  result.refinement_assignment =
      two_round(ref_stage, gt_boxes, scene.cameras, cfg.iou2d_threshold);

  Assignment gating;
  if (cfg.assignment_gate == AssignmentGate::kTwoRound) {
    gating = result.refinement_assignment;
  } else if (cfg.assignment_gate == AssignmentGate::kQueryInBox) {
    gating = assign_3d(ref_stage, gt_boxes);
  }
  std::vector<Detection> detections;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    if (cfg.assignment_gate != AssignmentGate::kOff &&
        gating.gt_index[i] == kNegative) {
      continue;
    }
    detections.push_back(result.records[i].detection);
  }
  result.stats.n_detections_pre_dedup = detections.size();
  result.detections = dedup(detections, cfg.dedup_dist_m);

  result.stats.n_points = points.size();
  result.stats.n_voxels = grid.occupied_cells();
  result.stats.n_votes = result.votes.size();
  result.stats.n_lidar_queries = n_lidar;
  result.stats.n_camera_queries = n_camera;
  for (const QueryRecord& rec : result.records) {
    result.stats.query_member_total += rec.query.point_indices.size();
  }
  result.stats.n_detections = result.detections.size();

  // Loss stack: segmentation and voting terms come from the per-point
  // stage, the six head terms from the two assignment stages.
  {
    std::vector<int> fg_labels;
    fg_labels.reserve(points.size());
    for (const Vec3& p : points) {
      fg_labels.push_back(containing_gt(p, scene.gt) != kNegative ? 1 : 0);
    }
    std::vector<double> probs;
    probs.reserve(points.size());
    for (double s : result.scores) probs.push_back(clamp_prob(s));
    result.losses.seg = focal_loss(probs, fg_labels);

    double vote_sum = 0.0;
    std::size_t vote_n = 0;
    for (const Vote& v : result.votes) {
      const int g = containing_gt(points[v.point_index], scene.gt);
      if (g == kNegative) continue;
      const Vec3 d = v.voted_center - scene.gt[g].box.center;
      vote_sum += (std::abs(d.x) + std::abs(d.y) + std::abs(d.z)) / 3.0;
      ++vote_n;
    }
    result.losses.vote = vote_n ? vote_sum / vote_n : 0.0;

    const Assignment& gen = result.generation_assignment;
    const Assignment& ref = result.refinement_assignment;
    result.losses.cls_lidar = stage_cls_loss(result.records, gen,
                                             result.scores, Modality::kLidar,
                                             false);
    result.losses.reg_lidar = stage_reg_loss(result.records, gen, scene.gt,
                                             Modality::kLidar, false);
    result.losses.cls_camera = stage_cls_loss(result.records, gen,
                                              result.scores, Modality::kCamera,
                                              false);
    result.losses.reg_camera = stage_reg_loss(result.records, gen, scene.gt,
                                              Modality::kCamera, false);
    result.losses.cls_refined = stage_cls_loss(result.records, ref,
                                               result.scores, std::nullopt,
                                               true);
    result.losses.reg_refined = stage_reg_loss(result.records, ref, scene.gt,
                                               std::nullopt, true);
  }
  return result;
}

}  // namespace sparsefusion
