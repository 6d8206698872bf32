#include "sparsefusion/lidar_query.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sparsefusion/rng.hpp"

namespace sparsefusion {

namespace {

std::int64_t cell_of(double coord, double origin, double size) {
  return static_cast<std::int64_t>(std::floor((coord - origin) / size));
}

// Index of the GT box containing p, nearest center first; -1 when outside
// all boxes.
int containing_gt(const Vec3& p, const std::vector<GtObject>& gt) {
  int best = -1;
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

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

VoxelGrid voxelize(const std::vector<Vec3>& points, const Vec3& voxel_size,
                   const Vec3& origin) {
  if (!(voxel_size.x > 0.0 && voxel_size.y > 0.0 && voxel_size.z > 0.0)) {
    throw std::invalid_argument("voxelize: voxel_size must be positive");
  }
  VoxelGrid grid;
  grid.voxel_size = voxel_size;
  grid.origin = origin;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const VoxelCoord c{cell_of(points[i].x, origin.x, voxel_size.x),
                       cell_of(points[i].y, origin.y, voxel_size.y),
                       cell_of(points[i].z, origin.z, voxel_size.z)};
    grid.cells[c].push_back(static_cast<int>(i));
  }
  return grid;
}

std::vector<double> oracle_score(const Scene& scene, double flip_prob,
                                 std::uint64_t seed) {
  auto rng = make_rng(seed, RngStream::kScoreFlip);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> scores;
  scores.reserve(scene.points.size());
  for (const ScenePoint& p : scene.points) {
    double s = containing_gt(p.position, scene.gt) >= 0 ? 1.0 : 0.0;
    if (flip_prob > 0.0 && u01(rng) < flip_prob) s = 1.0 - s;
    scores.push_back(s);
  }
  return scores;
}

std::vector<Vote> oracle_vote(const Scene& scene,
                              const std::vector<Vec3>& points,
                              const std::vector<double>& scores,
                              double fg_threshold, double sigma_m,
                              std::uint64_t seed) {
  if (points.size() != scores.size()) {
    throw std::invalid_argument("oracle_vote: points/scores size mismatch");
  }
  auto rng = make_rng(seed, RngStream::kVoteNoise);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vote> votes;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (scores[i] < fg_threshold) continue;
    const int gt = containing_gt(points[i], scene.gt);
    Vec3 center = gt >= 0 ? scene.gt[gt].box.center : points[i];
    if (sigma_m > 0.0) {
      center += Vec3{gauss(rng) * sigma_m, gauss(rng) * sigma_m,
                     gauss(rng) * sigma_m};
    }
    votes.push_back({static_cast<int>(i), center});
  }
  return votes;
}

std::vector<Cluster> ccl_cluster(const std::vector<Vote>& votes,
                                 const std::vector<Vec3>& points,
                                 double connect_radius_m,
                                 std::size_t min_cluster_points) {
  if (!(connect_radius_m > 0.0)) {
    throw std::invalid_argument("ccl_cluster: radius must be positive");
  }
  const std::size_t n = votes.size();
  std::unordered_map<VoxelCoord, std::vector<int>, VoxelCoordHash> hash;
  hash.reserve(n * 2);
  auto key_of = [&](const Vec3& p) {
    return VoxelCoord{cell_of(p.x, 0.0, connect_radius_m),
                      cell_of(p.y, 0.0, connect_radius_m),
                      cell_of(p.z, 0.0, connect_radius_m)};
  };
  for (std::size_t i = 0; i < n; ++i) {
    hash[key_of(votes[i].voted_center)].push_back(static_cast<int>(i));
  }

  UnionFind uf(n);
  const double r2 = connect_radius_m * connect_radius_m;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& c = votes[i].voted_center;
    const VoxelCoord base = key_of(c);
    for (std::int64_t dz = -1; dz <= 1; ++dz) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          const auto it =
              hash.find({base.x + dx, base.y + dy, base.z + dz});
          if (it == hash.end()) continue;
          for (int j : it->second) {
            if (j <= static_cast<int>(i)) continue;
            const Vec3 d = votes[j].voted_center - c;
            if (d.dot(d) <= r2) uf.unite(static_cast<int>(i), j);
          }
        }
      }
    }
  }

  // Components keyed by root, emitted in order of first appearance so the
  // output is a deterministic function of the vote list.
  std::unordered_map<int, std::size_t> root_to_cluster;
  std::vector<std::vector<int>> members;
  for (std::size_t i = 0; i < n; ++i) {
    const int root = uf.find(static_cast<int>(i));
    auto [it, inserted] = root_to_cluster.try_emplace(root, members.size());
    if (inserted) members.emplace_back();
    members[it->second].push_back(votes[i].point_index);
  }

  std::vector<Cluster> clusters;
  for (auto& m : members) {
    if (m.size() < min_cluster_points) continue;
    Cluster cl;
    cl.point_indices = std::move(m);
    Vec3 sum;
    for (int idx : cl.point_indices) sum += points[idx];
    cl.position = sum * (1.0 / static_cast<double>(cl.point_indices.size()));
    clusters.push_back(std::move(cl));
  }
  return clusters;
}

std::vector<Query> make_lidar_queries(const std::vector<Cluster>& clusters,
                                      const std::vector<Vec3>& points) {
  std::vector<Query> queries;
  queries.reserve(clusters.size());
  for (const Cluster& cl : clusters) {
    Query q;
    q.point_indices = cl.point_indices;
    q.modality = Modality::kLidar;
    Vec3 sum;
    for (int idx : q.point_indices) sum += points[idx];
    q.position = sum * (1.0 / static_cast<double>(q.point_indices.size()));
    queries.push_back(std::move(q));
  }
  return queries;
}

}  // namespace sparsefusion
