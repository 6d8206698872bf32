// The unified instance unit carried through refinement: a point cluster
// with a position, produced either by LiDAR clustering or by lifting a 2D
// instance mask. A point duplicated across overlapping frustums appears by
// index in each of the owning queries.
#pragma once

#include <optional>
#include <vector>

#include "sparsefusion/geom.hpp"

namespace sparsefusion {

enum class Modality { kLidar, kCamera };

struct QuerySourceBox {
  int camera_index = 0;
  Box2 box;
};

struct Query {
  std::vector<int> point_indices;  // into the scene point cloud
  Modality modality = Modality::kLidar;
  Vec3 position;
  std::optional<QuerySourceBox> source_box2;  // camera queries only
  std::optional<int> class_hint;              // from the source mask
};

}  // namespace sparsefusion
