#include "sparsefusion/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparsefusion {

Assignment assign_3d(const std::vector<Query>& queries,
                     const std::vector<Box3>& gts) {
  Assignment out;
  out.gt_index.assign(queries.size(), kNegative);
  out.round.assign(queries.size(), AssignRound::kNone);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    double best_dist = std::numeric_limits<double>::max();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!point_in_box3(queries[q].position, gts[g])) continue;
      const double d = (queries[q].position - gts[g].center).norm();
      if (d < best_dist) {
        best_dist = d;
        out.gt_index[q] = static_cast<int>(g);
        out.round[q] = AssignRound::kR3D;
      }
    }
  }
  return out;
}

Assignment assign_2d(const std::vector<Query>& queries,
                     const Assignment& partial, const std::vector<Box3>& gts,
                     const std::vector<CameraModel>& cams,
                     double iou_threshold) {
  Assignment out = partial;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (out.gt_index[q] != kNegative) continue;
    if (queries[q].modality != Modality::kCamera) continue;
    if (!queries[q].source_box2) {
      throw std::invalid_argument("assign_2d: camera query without 2D box");
    }
    const auto& src = *queries[q].source_box2;
    if (src.camera_index < 0 ||
        src.camera_index >= static_cast<int>(cams.size())) {
      throw std::invalid_argument("assign_2d: bad camera index");
    }
    const CameraModel& cam = cams[src.camera_index];
    double best_iou = 0.0;
    int best_gt = kNegative;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const auto projected = project_box3(gts[g], cam);
      if (!projected) continue;  // invisible GT: IoU 0
      const double iou = iou2d(src.box, *projected);
      if (iou > best_iou) {
        best_iou = iou;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt != kNegative && best_iou >= iou_threshold) {
      out.gt_index[q] = best_gt;
      out.round[q] = AssignRound::kR2D;
    }
  }
  return out;
}

Assignment two_round(const std::vector<Query>& queries,
                     const std::vector<Box3>& gts,
                     const std::vector<CameraModel>& cams,
                     double iou_threshold) {
  return assign_2d(queries, assign_3d(queries, gts), gts, cams,
                   iou_threshold);
}

RegressionTarget encode_target(const Box3& gt, const Vec3& anchor_pos) {
  RegressionTarget t;
  t.dx = gt.center.x - anchor_pos.x;
  t.dy = gt.center.y - anchor_pos.y;
  t.dz = gt.center.z - anchor_pos.z;
  t.log_w = std::log(gt.w);
  t.log_l = std::log(gt.l);
  t.log_h = std::log(gt.h);
  t.sin_ry = std::sin(gt.yaw);
  t.cos_ry = std::cos(gt.yaw);
  return t;
}

Box3 decode_target(const RegressionTarget& t, const Vec3& anchor_pos) {
  for (double v : t.as_array()) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("decode_target: non-finite input");
    }
  }
  return Box3({anchor_pos.x + t.dx, anchor_pos.y + t.dy, anchor_pos.z + t.dz},
              std::max(std::exp(t.log_w), kMinBoxDim),
              std::max(std::exp(t.log_l), kMinBoxDim),
              std::max(std::exp(t.log_h), kMinBoxDim),
              std::atan2(t.sin_ry, t.cos_ry));
}

double l1_loss(const RegressionTarget& pred, const RegressionTarget& tgt) {
  const auto a = pred.as_array();
  const auto b = tgt.as_array();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

double focal_loss(const std::vector<double>& pred_probs,
                  const std::vector<int>& labels, double alpha, double gamma) {
  if (pred_probs.size() != labels.size()) {
    throw std::invalid_argument("focal_loss: probs/labels size mismatch");
  }
  if (pred_probs.empty()) return 0.0;
  constexpr double kEps = 1e-7;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_probs.size(); ++i) {
    const double p = std::clamp(pred_probs[i], kEps, 1.0 - kEps);
    const double p_t = labels[i] ? p : 1.0 - p;
    sum += -alpha * std::pow(1.0 - p_t, gamma) * std::log(p_t);
  }
  return sum / static_cast<double>(pred_probs.size());
}

double total_loss(const LossBreakdown& parts) {
  return parts.seg + parts.vote + parts.cls_lidar + parts.reg_lidar +
         parts.cls_camera + parts.reg_camera + parts.cls_refined +
         parts.reg_refined;
}

}  // namespace sparsefusion
