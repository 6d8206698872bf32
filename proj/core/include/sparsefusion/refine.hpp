// Bi-modal query refinement. One code path serves both modalities: cluster
// feature extraction, reference-box prediction, alignment by re-cropping
// against the reference box, and the final detection. The box predictors
// are deterministic geometric fits behind pluggable contracts so learned
// drop-ins can replace them without touching the pipeline.
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "sparsefusion/geom.hpp"
#include "sparsefusion/query.hpp"
#include "sparsefusion/scene.hpp"

namespace sparsefusion {

inline constexpr std::size_t kFeatureDim = 32;
inline constexpr std::size_t kMaxOneHotClasses = 16;

// Fixed layout:
//   [0]      log1p(point count)
//   [1..3]   centroid
//   [4..6]   extents in the PCA frame (0.05 m floor)
//   [7..8]   XY-covariance eigenvalues (descending)
//   [9]      z range
//   [10..11] mean / max foreground score
//   [12..27] class_hint one-hot (ids 0..15)
//   [28..31] zero padding
using FeatureVector = std::array<double, kFeatureDim>;

struct Detection {
  Box3 box;
  int class_id = 0;
  double score = 0.0;
  Modality provenance = Modality::kLidar;
};

// Pluggable predictor contracts; both must be deterministic.
using ReferencePredictorFn =
    std::function<Box3(const FeatureVector&, const std::vector<Vec3>&)>;
using FinalPredictorFn =
    std::function<Box3(const FeatureVector&, const std::vector<Vec3>&)>;

FeatureVector extract_features(const Query& q, const std::vector<Vec3>& points,
                               const std::vector<double>& scores);

// Default reference predictor: PCA box fit over the member points.
Box3 predict_reference_box(const Query& q, const std::vector<Vec3>& points);

// Re-crops the query to every scene point inside ref (boundary inclusive)
// and recenters it; returns the query unchanged when the crop is empty.
Query align_query(const Query& q, const Box3& ref,
                  const std::vector<Vec3>& points);

// Refit over the aligned points. Class falls back from the mask hint to
// the nearest class by size-prior L2 over (w, l, h). Score is the mean
// member foreground score times a provenance bonus (camera 1.0,
// lidar 0.9), clamped to [0, 1].
Detection predict_final(const Query& aligned, const std::vector<Vec3>& points,
                        const std::vector<double>& scores,
                        const std::vector<ClassSpec>& classes);

inline constexpr double kCameraScoreBonus = 1.0;
inline constexpr double kLidarScoreBonus = 0.9;

// Greedy duplicate suppression by descending score: a detection is dropped
// when a kept detection of the same class sits within bev_center_dist_m.
// Output is in descending score order (ties keep input order).
std::vector<Detection> dedup(const std::vector<Detection>& detections,
                             double bev_center_dist_m);

}  // namespace sparsefusion
