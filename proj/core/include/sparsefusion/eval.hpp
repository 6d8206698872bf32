// Center-distance average precision over a corpus of scenes, with recall
// attributed to the originating modality of each matching detection.
#pragma once

#include <map>
#include <vector>

#include "sparsefusion/geom.hpp"
#include "sparsefusion/refine.hpp"
#include "sparsefusion/scene.hpp"

namespace sparsefusion {

struct PrCurve {
  std::vector<double> recall;     // cumulative, in detection rank order
  std::vector<double> precision;  // same ranks
  double ap = 0.0;
};

struct EvalResult {
  std::vector<double> thresholds_m;
  // (class_id, threshold index) -> curve
  std::map<std::pair<int, std::size_t>, PrCurve> curves;
  double mean_ap = 0.0;
  // Per threshold index: fraction of GTs matched, total and per modality.
  std::vector<double> recall;
  std::vector<double> recall_lidar;
  std::vector<double> recall_camera;
  std::size_t total_gt = 0;

  double mean_ap_at(double threshold_m) const;
};

// Greedy matching per scene: detections in descending score (ties by
// lower class_id, then lower input index) claim the nearest unmatched
// same-class GT within the BEV distance threshold. AP is mean interpolated
// precision over recall samples {0.01, ..., 1.00}. A class-threshold cell
// with no GTs scores 1 when it also has no detections, otherwise 0.
// Thresholds must be sorted ascending.
EvalResult evaluate(const std::vector<std::vector<Detection>>& per_scene_dets,
                    const std::vector<std::vector<GtObject>>& per_scene_gts,
                    const std::vector<double>& dist_thresholds_m);

}  // namespace sparsefusion
