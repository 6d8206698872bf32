// Range-scaling cost comparison: an analytic dense BEV-grid cost model
// against measured live-element counts and wall time of the sparse
// pipeline, at fixed object count across perception ranges.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsefusion/pipeline.hpp"
#include "sparsefusion/scene.hpp"

namespace sparsefusion {

struct CostReport {
  double range_m = 0.0;
  std::uint64_t dense_cells = 0;  // (2R / cell)^2, exactly quadratic in R
  std::uint64_t dense_bytes = 0;  // dense_cells * channels * bytes_per_el
  std::uint64_t sparse_live = 0;  // points + votes + sum of query sizes
  std::uint64_t n_points = 0;
  std::uint64_t n_voxels = 0;
  std::uint64_t n_queries = 0;
  double wall_ms = 0.0;  // median over repeats, pipeline only
};

// For each range: the dense model analytically, then the sparse pipeline
// on a scene regenerated at that range with the template's object count.
// Wall time is the median of `repeats` runs of run_scene_pipeline.
std::vector<CostReport> cost_scan(const std::vector<double>& ranges_m,
                                  double cell_m, int channels,
                                  int bytes_per_element,
                                  const SceneConfig& scene_template,
                                  const PipelineConfig& pipeline_cfg,
                                  int repeats = 5);

std::string cost_report_csv(const std::vector<CostReport>& reports);
std::string cost_report_table(const std::vector<CostReport>& reports);

}  // namespace sparsefusion
