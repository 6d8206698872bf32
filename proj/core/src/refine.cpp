#include "sparsefusion/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sparsefusion {

namespace {

std::vector<Vec3> member_points(const Query& q,
                                const std::vector<Vec3>& points) {
  std::vector<Vec3> out;
  out.reserve(q.point_indices.size());
  for (int idx : q.point_indices) out.push_back(points[idx]);
  return out;
}

}  // namespace

FeatureVector extract_features(const Query& q, const std::vector<Vec3>& points,
                               const std::vector<double>& scores) {
  if (q.point_indices.empty()) {
    throw std::invalid_argument("extract_features: empty query");
  }
  FeatureVector f{};
  const auto member = member_points(q, points);
  const double n = static_cast<double>(member.size());

  f[0] = std::log1p(n);
  Vec3 centroid;
  for (const Vec3& p : member) centroid += p;
  centroid = centroid * (1.0 / n);
  f[1] = centroid.x;
  f[2] = centroid.y;
  f[3] = centroid.z;

  const Box3 fitted = fit_box_pca(member);
  f[4] = fitted.w;
  f[5] = fitted.l;
  f[6] = fitted.h;

  double cxx = 0.0, cyy = 0.0, cxy = 0.0;
  for (const Vec3& p : member) {
    const double dx = p.x - centroid.x;
    const double dy = p.y - centroid.y;
    cxx += dx * dx;
    cyy += dy * dy;
    cxy += dx * dy;
  }
  cxx /= n;
  cyy /= n;
  cxy /= n;
  const double half_trace = 0.5 * (cxx + cyy);
  const double disc =
      std::sqrt(std::max(0.0, 0.25 * (cxx - cyy) * (cxx - cyy) + cxy * cxy));
  f[7] = half_trace + disc;
  f[8] = std::max(0.0, half_trace - disc);

  double min_z = member[0].z, max_z = member[0].z;
  double score_sum = 0.0, score_max = 0.0;
  for (std::size_t i = 0; i < member.size(); ++i) {
    min_z = std::min(min_z, member[i].z);
    max_z = std::max(max_z, member[i].z);
    const double s = scores[q.point_indices[i]];
    score_sum += s;
    score_max = std::max(score_max, s);
  }
  f[9] = max_z - min_z;
  f[10] = score_sum / n;
  f[11] = score_max;

  if (q.class_hint && *q.class_hint >= 0 &&
      *q.class_hint < static_cast<int>(kMaxOneHotClasses)) {
    f[12 + *q.class_hint] = 1.0;
  }
  return f;
}

Box3 predict_reference_box(const Query& q, const std::vector<Vec3>& points) {
  if (q.point_indices.empty()) {
    throw std::invalid_argument("predict_reference_box: empty query");
  }
  return fit_box_pca(member_points(q, points));
}

Query align_query(const Query& q, const Box3& ref,
                  const std::vector<Vec3>& points) {
  std::vector<int> cropped;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (point_in_box3(points[i], ref)) cropped.push_back(static_cast<int>(i));
  }
  if (cropped.empty()) return q;
  Query aligned = q;
  aligned.point_indices = std::move(cropped);
  Vec3 sum;
  for (int idx : aligned.point_indices) sum += points[idx];
  aligned.position =
      sum * (1.0 / static_cast<double>(aligned.point_indices.size()));
  return aligned;
}

Detection predict_final(const Query& aligned, const std::vector<Vec3>& points,
                        const std::vector<double>& scores,
                        const std::vector<ClassSpec>& classes) {
  if (aligned.point_indices.empty()) {
    throw std::invalid_argument("predict_final: empty query");
  }
  Detection det;
  det.box = fit_box_pca(member_points(aligned, points));
  det.provenance = aligned.modality;

  if (aligned.class_hint) {
    det.class_id = *aligned.class_hint;
  } else {
    double best = std::numeric_limits<double>::max();
    for (const ClassSpec& cs : classes) {
      const double dw = det.box.w - cs.size_prior.x;
      const double dl = det.box.l - cs.size_prior.y;
      const double dh = det.box.h - cs.size_prior.z;
      const double d2 = dw * dw + dl * dl + dh * dh;
      if (d2 < best) {
        best = d2;
        det.class_id = cs.class_id;
      }
    }
  }

  double score_sum = 0.0;
  for (int idx : aligned.point_indices) score_sum += scores[idx];
  const double bonus = aligned.modality == Modality::kCamera
                           ? kCameraScoreBonus
                           : kLidarScoreBonus;
  det.score = std::clamp(
      score_sum / static_cast<double>(aligned.point_indices.size()) * bonus,
      0.0, 1.0);
  return det;
}

std::vector<Detection> dedup(const std::vector<Detection>& detections,
                             double bev_center_dist_m) {
  if (!(bev_center_dist_m > 0.0)) {
    throw std::invalid_argument("dedup: threshold must be positive");
  }
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return detections[a].score > detections[b].score;
                   });
  std::vector<Detection> kept;
  for (std::size_t idx : order) {
    const Detection& d = detections[idx];
    bool suppressed = false;
    for (const Detection& k : kept) {
      if (k.class_id != d.class_id) continue;
      const double dx = k.box.center.x - d.box.center.x;
      const double dy = k.box.center.y - d.box.center.y;
      if (std::sqrt(dx * dx + dy * dy) < bev_center_dist_m) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

}  // namespace sparsefusion
