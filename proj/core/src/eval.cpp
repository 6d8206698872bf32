#include "sparsefusion/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace sparsefusion {

namespace {

struct RankedDet {
  double score;
  std::size_t scene;
  std::size_t index;  // within its scene's detection list
  Modality provenance;
  Vec3 center;
};

double bev_dist(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double interpolated_ap(const PrCurve& curve) {
  double ap = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double r = k / 100.0;
    double best = 0.0;
    for (std::size_t j = 0; j < curve.recall.size(); ++j) {
      if (curve.recall[j] >= r) best = std::max(best, curve.precision[j]);
    }
    ap += best;
  }
  return ap / 100.0;
}

}  // namespace

double EvalResult::mean_ap_at(double threshold_m) const {
  std::size_t t_idx = thresholds_m.size();
  for (std::size_t i = 0; i < thresholds_m.size(); ++i) {
    if (thresholds_m[i] == threshold_m) t_idx = i;
  }
  if (t_idx == thresholds_m.size()) {
    throw std::invalid_argument("mean_ap_at: threshold not evaluated");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [key, curve] : curves) {
    if (key.second != t_idx) continue;
    sum += curve.ap;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 1.0;
}

EvalResult evaluate(const std::vector<std::vector<Detection>>& per_scene_dets,
                    const std::vector<std::vector<GtObject>>& per_scene_gts,
                    const std::vector<double>& dist_thresholds_m) {
  if (per_scene_dets.size() != per_scene_gts.size()) {
    throw std::invalid_argument("evaluate: scene count mismatch");
  }
  if (!std::is_sorted(dist_thresholds_m.begin(), dist_thresholds_m.end())) {
    throw std::invalid_argument("evaluate: thresholds must be ascending");
  }

  std::set<int> class_ids;
  for (const auto& gts : per_scene_gts) {
    for (const auto& g : gts) class_ids.insert(g.class_id);
  }
  for (const auto& dets : per_scene_dets) {
    for (const auto& d : dets) class_ids.insert(d.class_id);
  }

  EvalResult result;
  result.thresholds_m = dist_thresholds_m;
  result.recall.assign(dist_thresholds_m.size(), 0.0);
  result.recall_lidar.assign(dist_thresholds_m.size(), 0.0);
  result.recall_camera.assign(dist_thresholds_m.size(), 0.0);
  for (const auto& gts : per_scene_gts) result.total_gt += gts.size();

  for (std::size_t t = 0; t < dist_thresholds_m.size(); ++t) {
    const double threshold = dist_thresholds_m[t];
    std::size_t matched_total = 0, matched_lidar = 0, matched_camera = 0;

    for (int cls : class_ids) {
      std::vector<RankedDet> ranked;
      std::size_t n_gt = 0;
      for (std::size_t s = 0; s < per_scene_dets.size(); ++s) {
        for (std::size_t i = 0; i < per_scene_dets[s].size(); ++i) {
          const Detection& d = per_scene_dets[s][i];
          if (d.class_id != cls) continue;
          ranked.push_back({d.score, s, i, d.provenance, d.box.center});
        }
        for (const GtObject& g : per_scene_gts[s]) {
          if (g.class_id == cls) ++n_gt;
        }
      }
      std::sort(ranked.begin(), ranked.end(),
                [](const RankedDet& a, const RankedDet& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.scene != b.scene) return a.scene < b.scene;
                  return a.index < b.index;
                });

      PrCurve curve;
      if (n_gt == 0) {
        curve.ap = ranked.empty() ? 1.0 : 0.0;
        result.curves[{cls, t}] = std::move(curve);
        continue;
      }

      std::vector<std::vector<bool>> gt_matched(per_scene_gts.size());
      for (std::size_t s = 0; s < per_scene_gts.size(); ++s) {
        gt_matched[s].assign(per_scene_gts[s].size(), false);
      }

      std::size_t tp = 0, fp = 0;
      for (const RankedDet& det : ranked) {
        const auto& gts = per_scene_gts[det.scene];
        double best_dist = std::numeric_limits<double>::max();
        int best_gt = -1;
        for (std::size_t g = 0; g < gts.size(); ++g) {
          if (gts[g].class_id != cls || gt_matched[det.scene][g]) continue;
          const double d = bev_dist(det.center, gts[g].box.center);
          if (d <= threshold && d < best_dist) {
            best_dist = d;
            best_gt = static_cast<int>(g);
          }
        }
        if (best_gt >= 0) {
          gt_matched[det.scene][best_gt] = true;
          ++tp;
          ++matched_total;
          if (det.provenance == Modality::kLidar) {
            ++matched_lidar;
          } else {
            ++matched_camera;
          }
        } else {
          ++fp;
        }
        curve.recall.push_back(static_cast<double>(tp) /
                               static_cast<double>(n_gt));
        curve.precision.push_back(static_cast<double>(tp) /
                                  static_cast<double>(tp + fp));
      }
      curve.ap = interpolated_ap(curve);
      result.curves[{cls, t}] = std::move(curve);
    }

    if (result.total_gt > 0) {
      result.recall[t] =
          static_cast<double>(matched_total) / result.total_gt;
      result.recall_lidar[t] =
          static_cast<double>(matched_lidar) / result.total_gt;
      result.recall_camera[t] =
          static_cast<double>(matched_camera) / result.total_gt;
    }
  }

  double ap_sum = 0.0;
  for (const auto& [key, curve] : result.curves) ap_sum += curve.ap;
  result.mean_ap =
      result.curves.empty() ? 1.0 : ap_sum / result.curves.size();
  return result;
}

}  // namespace sparsefusion
