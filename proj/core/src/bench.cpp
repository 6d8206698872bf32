#include "sparsefusion/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sparsefusion {

std::vector<CostReport> cost_scan(const std::vector<double>& ranges_m,
                                  double cell_m, int channels,
                                  int bytes_per_element,
                                  const SceneConfig& scene_template,
                                  const PipelineConfig& pipeline_cfg,
                                  int repeats) {
  if (!(cell_m > 0.0) || channels <= 0 || bytes_per_element <= 0 ||
      repeats <= 0) {
    throw std::invalid_argument("cost_scan: invalid parameters");
  }
  std::vector<CostReport> reports;
  reports.reserve(ranges_m.size());
  for (double range : ranges_m) {
    CostReport report;
    report.range_m = range;
    const std::uint64_t side =
        static_cast<std::uint64_t>(std::llround(2.0 * range / cell_m));
    report.dense_cells = side * side;
    report.dense_bytes = report.dense_cells *
                         static_cast<std::uint64_t>(channels) *
                         static_cast<std::uint64_t>(bytes_per_element);

    SceneConfig cfg = scene_template;
    cfg.range_m = range;
    Scene scene = generate_scene(cfg);
    scene.masks = render_masks(scene);

    std::vector<double> times;
    PipelineStats stats;
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const SceneResult result =
          run_scene_pipeline(scene, cfg.classes, pipeline_cfg);
      const auto t1 = std::chrono::steady_clock::now();
      times.push_back(
          std::chrono::duration<double, std::milli>(t1 - t0).count());
      stats = result.stats;
    }
    std::sort(times.begin(), times.end());
    report.wall_ms = times[times.size() / 2];
    report.sparse_live = stats.sparse_live();
    report.n_points = stats.n_points;
    report.n_voxels = stats.n_voxels;
    report.n_queries = stats.n_lidar_queries + stats.n_camera_queries;
    reports.push_back(report);
  }
  return reports;
}

std::string cost_report_csv(const std::vector<CostReport>& reports) {
  std::ostringstream os;
  os << "range_m,dense_cells,dense_bytes,sparse_live,wall_ms\n";
  for (const CostReport& r : reports) {
    os << r.range_m << ',' << r.dense_cells << ',' << r.dense_bytes << ','
       << r.sparse_live << ',' << r.wall_ms << '\n';
  }
  return os.str();
}

std::string cost_report_table(const std::vector<CostReport>& reports) {
  std::ostringstream os;
  os << "  range_m   dense_cells     dense_bytes   sparse_live     wall_ms\n";
  char row[160];
  for (const CostReport& r : reports) {
    std::snprintf(row, sizeof(row), "%9.1f %13llu %15llu %13llu %11.3f\n",
                  r.range_m, static_cast<unsigned long long>(r.dense_cells),
                  static_cast<unsigned long long>(r.dense_bytes),
                  static_cast<unsigned long long>(r.sparse_live), r.wall_ms);
    os << row;
  }
  return os.str();
}

}  // namespace sparsefusion
