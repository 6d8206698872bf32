// LiDAR-side query generation: sparse voxel indexing, foreground scoring,
// center voting and connected-components clustering of the voted centers.
// The scorer and voter are deterministic oracles standing behind pluggable
// contracts; any deterministic drop-in with the same shape works.
#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "sparsefusion/geom.hpp"
#include "sparsefusion/query.hpp"
#include "sparsefusion/scene.hpp"

namespace sparsefusion {

struct VoxelCoord {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;
  bool operator==(const VoxelCoord&) const = default;
};

struct VoxelCoordHash {
  std::size_t operator()(const VoxelCoord& c) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t v : {static_cast<std::uint64_t>(c.x),
                            static_cast<std::uint64_t>(c.y),
                            static_cast<std::uint64_t>(c.z)}) {
      h ^= v;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct VoxelGrid {
  Vec3 voxel_size{0.2, 0.2, 0.2};
  Vec3 origin;
  std::unordered_map<VoxelCoord, std::vector<int>, VoxelCoordHash> cells;

  std::size_t occupied_cells() const { return cells.size(); }
};

struct Vote {
  int point_index = 0;
  Vec3 voted_center;
};

struct Cluster {
  std::vector<int> point_indices;
  Vec3 position;  // unweighted mean of the member point coordinates
};

// Deterministic stand-ins for the learned per-point heads. Both must be
// pure functions of their arguments.
using ScorerFn = std::function<std::vector<double>(
    const Scene&, const std::vector<Vec3>& points)>;
using VoterFn = std::function<std::vector<Vote>(
    const std::vector<Vec3>& points, const std::vector<double>& scores)>;

// Partitions point indices into voxels; cell coordinate is
// floor((p - origin) / size) per axis.
VoxelGrid voxelize(const std::vector<Vec3>& points, const Vec3& voxel_size,
                   const Vec3& origin);

// Foreground score 1 for points inside any GT box, 0 otherwise, each
// label independently flipped with flip_prob.
std::vector<double> oracle_score(const Scene& scene, double flip_prob,
                                 std::uint64_t seed);

// Every point with score >= fg_threshold votes: true-foreground points
// vote their GT box center (nearest center when inside several),
// everything else votes its own position; isotropic Gaussian noise of
// std sigma_m is added either way.
std::vector<Vote> oracle_vote(const Scene& scene,
                              const std::vector<Vec3>& points,
                              const std::vector<double>& scores,
                              double fg_threshold, double sigma_m,
                              std::uint64_t seed);

// Connected components over votes with an edge wherever two voted centers
// are within connect_radius_m, computed on a spatial hash of cell size
// connect_radius_m (candidates come from the 27 adjacent cells).
// Components smaller than min_cluster_points are discarded. Cluster
// positions are centroids of the member points, not of the votes.
std::vector<Cluster> ccl_cluster(const std::vector<Vote>& votes,
                                 const std::vector<Vec3>& points,
                                 double connect_radius_m,
                                 std::size_t min_cluster_points = 2);

// One query per cluster, position at the member-point centroid.
std::vector<Query> make_lidar_queries(const std::vector<Cluster>& clusters,
                                      const std::vector<Vec3>& points);

}  // namespace sparsefusion
