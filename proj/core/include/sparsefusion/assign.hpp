// 3D/2D two-round label assignment and the target/loss encoding. Round one
// is query-in-box on 3D positions for every query; round two is max-IoU
// between a camera query's source 2D box and the projected GT boxes, only
// for camera queries still unassigned after round one.
#pragma once

#include <array>
#include <vector>

#include "sparsefusion/geom.hpp"
#include "sparsefusion/query.hpp"

namespace sparsefusion {

inline constexpr int kNegative = -1;

enum class AssignRound { kNone, kR3D, kR2D };

struct Assignment {
  std::vector<int> gt_index;        // kNegative when unassigned
  std::vector<AssignRound> round;   // kNone iff negative
};

// Query-in-box for both modalities: positive iff the position lies inside
// at least one GT box; nearest center wins multiple containment, ties by
// lowest gt index.
Assignment assign_3d(const std::vector<Query>& queries,
                     const std::vector<Box3>& gts);

// Max-IoU round for camera queries left negative in `partial`. Every GT is
// projected into the query's source camera; invisible GTs contribute IoU
// 0. Assigns the argmax GT when the best IoU reaches iou_threshold.
// Requires source_box2 on every camera query.
Assignment assign_2d(const std::vector<Query>& queries,
                     const Assignment& partial, const std::vector<Box3>& gts,
                     const std::vector<CameraModel>& cams,
                     double iou_threshold);

// assign_3d, then assign_2d on the remainder; round-one decisions are
// never overwritten.
Assignment two_round(const std::vector<Query>& queries,
                     const std::vector<Box3>& gts,
                     const std::vector<CameraModel>& cams,
                     double iou_threshold = 0.5);

// (dx, dy, dz, log w, log l, log h, sin yaw, cos yaw) relative to an
// anchor position.
struct RegressionTarget {
  double dx = 0.0, dy = 0.0, dz = 0.0;
  double log_w = 0.0, log_l = 0.0, log_h = 0.0;
  double sin_ry = 0.0, cos_ry = 1.0;

  std::array<double, 8> as_array() const {
    return {dx, dy, dz, log_w, log_l, log_h, sin_ry, cos_ry};
  }
};

RegressionTarget encode_target(const Box3& gt, const Vec3& anchor_pos);

// Inverse of encode_target: dims exp'd and floored at 0.05 m, yaw from
// atan2 (inputs need not be normalized). Throws on non-finite input.
Box3 decode_target(const RegressionTarget& t, const Vec3& anchor_pos);

// Mean absolute difference over the 8 target components.
double l1_loss(const RegressionTarget& pred, const RegressionTarget& tgt);

// mean_i of -alpha * (1 - p_t)^gamma * log(p_t), p_t the label-adjusted
// probability, probabilities clamped at 1e-7. alpha scales uniformly so
// that gamma = 0, alpha = 1 is exactly cross-entropy.
double focal_loss(const std::vector<double>& pred_probs,
                  const std::vector<int>& labels, double alpha = 0.25,
                  double gamma = 2.0);

// The eight loss terms, reported individually; total is their unweighted
// sum.
struct LossBreakdown {
  double seg = 0.0;
  double vote = 0.0;
  double cls_lidar = 0.0;
  double reg_lidar = 0.0;
  double cls_camera = 0.0;
  double reg_camera = 0.0;
  double cls_refined = 0.0;
  double reg_refined = 0.0;
};

double total_loss(const LossBreakdown& parts);

}  // namespace sparsefusion
