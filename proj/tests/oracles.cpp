#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace sparsefusion::testing {

std::optional<PixelPoint> project_homogeneous(const Vec3& p,
                                              const CameraModel& cam) {
  // Build the 4x4 [R t; 0 1] and multiply the homogeneous point.
  std::array<double, 16> T{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) T[r * 4 + c] = cam.world_to_cam_rotation.m[r * 3 + c];
  }
  T[3] = cam.world_to_cam_translation.x;
  T[7] = cam.world_to_cam_translation.y;
  T[11] = cam.world_to_cam_translation.z;
  T[15] = 1.0;
  const std::array<double, 4> ph{p.x, p.y, p.z, 1.0};
  std::array<double, 4> q{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) q[r] += T[r * 4 + c] * ph[c];
  }
  if (q[2] <= 1e-6) return std::nullopt;
  // Intrinsics as a second homogeneous product.
  const std::array<double, 9> K{cam.fx, 0, cam.cx, 0, cam.fy, cam.cy, 0, 0, 1};
  std::array<double, 3> uvw{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) uvw[r] += K[r * 3 + c] * q[c];
  }
  return PixelPoint{uvw[0] / uvw[2], uvw[1] / uvw[2], q[2]};
}

bool point_in_box3_halfspace(const Vec3& p, const Box3& b) {
  const auto corners = box3_corners(b);
  Vec3 centroid;
  for (const Vec3& c : corners) centroid += c;
  centroid = centroid * (1.0 / 8.0);
  // Axis directions from corner differences (corner order contract).
  const std::array<std::pair<int, double>, 3> axes{
      std::make_pair(1, b.w), std::make_pair(2, b.l), std::make_pair(4, b.h)};
  for (const auto& [bit, extent] : axes) {
    Vec3 dir = corners[bit] - corners[0];
    const double len = dir.norm();
    dir = dir * (1.0 / len);
    const double coord = (p - centroid).dot(dir);
    if (std::abs(coord) > 0.5 * extent) return false;
  }
  return true;
}

double iou2d_raster(const Box2& a, const Box2& b, int n) {
  const double lo_x = std::min(a.min_x, b.min_x);
  const double hi_x = std::max(a.max_x, b.max_x);
  const double lo_y = std::min(a.min_y, b.min_y);
  const double hi_y = std::max(a.max_y, b.max_y);
  const double sx = (hi_x - lo_x) / n;
  const double sy = (hi_y - lo_y) / n;
  if (!(sx > 0.0) || !(sy > 0.0)) return 0.0;

  std::vector<unsigned char> col_a(n), col_b(n), row_a(n), row_b(n);
  for (int i = 0; i < n; ++i) {
    const double x = lo_x + (i + 0.5) * sx;
    const double y = lo_y + (i + 0.5) * sy;
    col_a[i] = x >= a.min_x && x <= a.max_x;
    col_b[i] = x >= b.min_x && x <= b.max_x;
    row_a[i] = y >= a.min_y && y <= a.max_y;
    row_b[i] = y >= b.min_y && y <= b.max_y;
  }
  std::uint64_t in_a = 0, in_b = 0, in_both = 0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const unsigned char ia = row_a[y] & col_a[x];
      const unsigned char ib = row_b[y] & col_b[x];
      in_a += ia;
      in_b += ib;
      in_both += ia & ib;
    }
  }
  const std::uint64_t in_union = in_a + in_b - in_both;
  if (in_union == 0) return 0.0;
  return static_cast<double>(in_both) / static_cast<double>(in_union);
}

double box3_volume_iou(const Box3& a, const Box3& b, double resolution) {
  const auto ca = box3_corners(a);
  const auto cb = box3_corners(b);
  double lo_x = std::numeric_limits<double>::max(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x, lo_z = lo_x, hi_z = -lo_x;
  for (const auto& corners : {ca, cb}) {
    for (const Vec3& c : corners) {
      lo_x = std::min(lo_x, c.x);
      hi_x = std::max(hi_x, c.x);
      lo_y = std::min(lo_y, c.y);
      hi_y = std::max(hi_y, c.y);
      lo_z = std::min(lo_z, c.z);
      hi_z = std::max(hi_z, c.z);
    }
  }
  std::uint64_t in_a = 0, in_b = 0, in_both = 0;
  for (double z = lo_z + 0.5 * resolution; z < hi_z; z += resolution) {
    for (double y = lo_y + 0.5 * resolution; y < hi_y; y += resolution) {
      for (double x = lo_x + 0.5 * resolution; x < hi_x; x += resolution) {
        const Vec3 p{x, y, z};
        const bool ia = point_in_box3(p, a);
        const bool ib = point_in_box3(p, b);
        in_a += ia;
        in_b += ib;
        in_both += ia && ib;
      }
    }
  }
  const std::uint64_t in_union = in_a + in_b - in_both;
  if (in_union == 0) return 0.0;
  return static_cast<double>(in_both) / static_cast<double>(in_union);
}

std::vector<std::vector<int>> ccl_brute_force(const std::vector<Vote>& votes,
                                              double connect_radius_m,
                                              std::size_t min_cluster_points) {
  const std::size_t n = votes.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  const double r2 = connect_radius_m * connect_radius_m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 d = votes[i].voted_center - votes[j].voted_center;
      if (d.dot(d) <= r2) {
        const int ra = find(static_cast<int>(i));
        const int rb = find(static_cast<int>(j));
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    groups[find(static_cast<int>(i))].push_back(votes[i].point_index);
  }
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) {
    if (members.size() < min_cluster_points) continue;
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<int>> partition_of(const std::vector<Cluster>& cl) {
  std::vector<std::vector<int>> out;
  for (const Cluster& c : cl) {
    std::vector<int> members = c.point_indices;
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Detection> dedup_brute_force(const std::vector<Detection>& dets,
                                         double bev_center_dist_m) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  std::vector<Detection> kept;
  for (std::size_t i : order) {
    bool drop = false;
    for (const Detection& k : kept) {
      const double dx = k.box.center.x - dets[i].box.center.x;
      const double dy = k.box.center.y - dets[i].box.center.y;
      drop = drop || (k.class_id == dets[i].class_id &&
                      std::hypot(dx, dy) < bev_center_dist_m);
    }
    if (!drop) kept.push_back(dets[i]);
  }
  return kept;
}

double focal_reference(const std::vector<double>& probs,
                       const std::vector<int>& labels, double alpha,
                       double gamma) {
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    double p = probs[i];
    if (p < 1e-7) p = 1e-7;
    if (p > 1.0 - 1e-7) p = 1.0 - 1e-7;
    const double pt = labels[i] == 1 ? p : 1.0 - p;
    total += -alpha * std::exp(gamma * std::log(1.0 - pt)) * std::log(pt);
  }
  return probs.empty() ? 0.0 : total / static_cast<double>(probs.size());
}

double mean_ap_reference(
    const std::vector<std::vector<Detection>>& per_scene_dets,
    const std::vector<std::vector<GtObject>>& per_scene_gts,
    double threshold_m) {
  std::set<int> classes;
  for (const auto& gts : per_scene_gts) {
    for (const auto& g : gts) classes.insert(g.class_id);
  }
  for (const auto& dets : per_scene_dets) {
    for (const auto& d : dets) classes.insert(d.class_id);
  }
  double ap_sum = 0.0;
  for (int cls : classes) {
    struct Entry {
      double score;
      std::size_t scene;
      std::size_t index;
      Vec3 center;
    };
    std::vector<Entry> entries;
    std::size_t n_gt = 0;
    for (std::size_t s = 0; s < per_scene_dets.size(); ++s) {
      for (std::size_t i = 0; i < per_scene_dets[s].size(); ++i) {
        if (per_scene_dets[s][i].class_id == cls) {
          entries.push_back({per_scene_dets[s][i].score, s, i,
                             per_scene_dets[s][i].box.center});
        }
      }
      for (const auto& g : per_scene_gts[s]) n_gt += g.class_id == cls;
    }
    if (n_gt == 0) {
      ap_sum += entries.empty() ? 1.0 : 0.0;
      continue;
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.scene != b.scene) return a.scene < b.scene;
      return a.index < b.index;
    });
    std::vector<std::set<std::size_t>> used(per_scene_gts.size());
    std::vector<double> rec, prec;
    std::size_t tp = 0, fp = 0;
    for (const Entry& e : entries) {
      const auto& gts = per_scene_gts[e.scene];
      int best = -1;
      double best_d = threshold_m;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (gts[g].class_id != cls || used[e.scene].count(g)) continue;
        const double d = std::hypot(e.center.x - gts[g].box.center.x,
                                    e.center.y - gts[g].box.center.y);
        if (d <= best_d) {
          best_d = d;
          best = static_cast<int>(g);
        }
      }
      if (best >= 0) {
        used[e.scene].insert(static_cast<std::size_t>(best));
        ++tp;
      } else {
        ++fp;
      }
      rec.push_back(static_cast<double>(tp) / n_gt);
      prec.push_back(static_cast<double>(tp) / (tp + fp));
    }
    double ap = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double r = k / 100.0;
      double best = 0.0;
      for (std::size_t j = 0; j < rec.size(); ++j) {
        if (rec[j] >= r && prec[j] > best) best = prec[j];
      }
      ap += best;
    }
    ap_sum += ap / 100.0;
  }
  return classes.empty() ? 1.0 : ap_sum / classes.size();
}

}  // namespace sparsefusion::testing
