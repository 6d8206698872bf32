// Command-line front end: synth / detect / assign / eval / bench.
// Every command is deterministic given the config and seed; the
// SPARSEFUSION_SEED environment variable overrides both the --seed flag
// and the config file.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsefusion/bench.hpp"
#include "sparsefusion/rng.hpp"
#include "sparsefusion/serialize.hpp"

namespace fs = std::filesystem;
using namespace sparsefusion;

namespace {

constexpr int kExitMalformed = 2;
constexpr int kExitConstraint = 3;

std::uint64_t resolve_seed(std::uint64_t config_seed,
                           std::optional<std::uint64_t> flag_seed) {
  if (const char* env = std::getenv("SPARSEFUSION_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  if (flag_seed) return *flag_seed;
  return config_seed;
}

RunConfig load_config(const std::string& path,
                      std::optional<std::uint64_t> flag_seed) {
  RunConfig cfg =
      path.empty() ? default_run_config() : load_run_config(path);
  const std::uint64_t seed = resolve_seed(cfg.pipeline.seed, flag_seed);
  cfg.scene.seed = seed;
  cfg.pipeline.seed = seed;
  return cfg;
}

std::vector<fs::path> sorted_files(const std::string& dir,
                                   const std::string& suffix,
                                   const char* what) {
  if (!fs::is_directory(dir)) {
    throw IoError(IoError::Kind::kMalformed,
                  std::string(what) + ": '" + dir + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() >= suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) ==
            0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<fs::path> scene_files(const std::string& dir) {
  auto files = sorted_files(dir, ".json", "scenes");
  std::erase_if(files, [](const fs::path& p) {
    return p.filename().string().ends_with(".det.json");
  });
  return files;
}

int cmd_config(const std::string& out_path) {
  const RunConfig cfg = default_run_config();
  if (out_path.empty()) {
    std::fputs(run_config_to_json(cfg).c_str(), stdout);
  } else {
    save_run_config(cfg, out_path);
  }
  return 0;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir,
              int n_scenes, std::optional<std::uint64_t> flag_seed) {
  RunConfig cfg = load_config(config_path, flag_seed);
  fs::create_directories(out_dir);
  for (int i = 0; i < n_scenes; ++i) {
    SceneConfig sc = cfg.scene;
    sc.seed = split_seed(cfg.scene.seed, RngStream::kSceneIndex,
                         static_cast<std::uint64_t>(i));
    Scene scene = generate_scene(sc);
    scene.masks = render_masks(scene);
    char name[64];
    std::snprintf(name, sizeof(name), "scene_%04d.json", i);
    save_scene(scene, (fs::path(out_dir) / name).string());
  }
  std::printf("wrote %d scene(s) to %s\n", n_scenes, out_dir.c_str());
  return 0;
}

int cmd_detect(const std::string& config_path, const std::string& scenes_dir,
               const std::string& out_dir,
               std::optional<std::uint64_t> flag_seed) {
  RunConfig cfg = load_config(config_path, flag_seed);
  fs::create_directories(out_dir);
  const auto files = scene_files(scenes_dir);
  for (const fs::path& file : files) {
    const Scene scene = load_scene(file.string());
    const SceneResult result =
        run_scene_pipeline(scene, cfg.scene.classes, cfg.pipeline);
    DetectionFile det;
    det.source_scene = file.stem().string();
    det.stats = result.stats;
    det.detections = result.detections;
    const fs::path out =
        fs::path(out_dir) / (file.stem().string() + ".det.json");
    save_detections(det, out.string());
    std::printf("%s: %zu detections (%zu lidar q, %zu camera q, %zu pts)\n",
                det.source_scene.c_str(), result.detections.size(),
                result.stats.n_lidar_queries, result.stats.n_camera_queries,
                result.stats.n_points);
  }
  std::printf("processed %zu scene(s)\n", files.size());
  return 0;
}

const char* round_name(AssignRound round) {
  switch (round) {
    case AssignRound::kR3D:
      return "R3D";
    case AssignRound::kR2D:
      return "R2D";
    default:
      return "NONE";
  }
}

int cmd_assign(const std::string& config_path, const std::string& scenes_dir,
               const std::string& out_path,
               std::optional<std::uint64_t> flag_seed) {
  RunConfig cfg = load_config(config_path, flag_seed);
  nlohmann::json report = nlohmann::json::array();
  std::printf("%-18s %6s %8s %6s %10s %6s\n", "scene", "query", "modality",
              "stage", "gt", "round");
  for (const fs::path& file : scene_files(scenes_dir)) {
    const Scene scene = load_scene(file.string());
    const SceneResult result =
        run_scene_pipeline(scene, cfg.scene.classes, cfg.pipeline);
    const std::string stem = file.stem().string();
    for (int stage = 0; stage < 2; ++stage) {
      const Assignment& assignment = stage == 0
                                         ? result.generation_assignment
                                         : result.refinement_assignment;
      const char* stage_name = stage == 0 ? "gen" : "ref";
      for (std::size_t q = 0; q < result.records.size(); ++q) {
        const char* modality =
            result.records[q].query.modality == Modality::kCamera ? "camera"
                                                                  : "lidar";
        const int gt = assignment.gt_index[q];
        std::printf("%-18s %6zu %8s %6s %10s %6s\n", stem.c_str(), q,
                    modality, stage_name,
                    gt == kNegative ? "NEGATIVE" : std::to_string(gt).c_str(),
                    round_name(assignment.round[q]));
        report.push_back({{"scene", stem},
                          {"query", q},
                          {"modality", modality},
                          {"stage", stage_name},
                          {"gt_index", gt},
                          {"round", round_name(assignment.round[q])}});
      }
    }
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      throw IoError(IoError::Kind::kMalformed,
                    "assign: cannot write '" + out_path + "'");
    }
    out << report.dump(2) << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& detections_dir, const std::string& scenes_dir,
             const std::string& out_path, std::vector<double> thresholds) {
  if (thresholds.empty()) thresholds = {0.5, 1.0, 2.0, 4.0};
  std::vector<std::vector<Detection>> per_scene_dets;
  std::vector<std::vector<GtObject>> per_scene_gts;
  for (const fs::path& file : scene_files(scenes_dir)) {
    const Scene scene = load_scene(file.string());
    const fs::path det_path =
        fs::path(detections_dir) / (file.stem().string() + ".det.json");
    if (!fs::exists(det_path)) {
      throw IoError(IoError::Kind::kMalformed,
                    "eval: missing detections file '" + det_path.string() +
                        "' for scene '" + file.stem().string() + "'");
    }
    per_scene_dets.push_back(load_detections(det_path.string()).detections);
    per_scene_gts.push_back(scene.gt);
  }
  const EvalResult result =
      evaluate(per_scene_dets, per_scene_gts, thresholds);
  std::fputs(format_eval_result(result).c_str(), stdout);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      throw IoError(IoError::Kind::kMalformed,
                    "eval: cannot write '" + out_path + "'");
    }
    out << eval_result_to_json(result);
  }
  return 0;
}

int cmd_bench(const std::string& config_path, std::vector<double> ranges,
              double cell_m, int channels, int bytes_per_element, int repeats,
              const std::string& csv_path, const std::string& json_path,
              std::optional<std::uint64_t> flag_seed) {
  RunConfig cfg = load_config(config_path, flag_seed);
  if (ranges.empty()) ranges = {54.0, 100.0, 200.0};
  const auto reports = cost_scan(ranges, cell_m, channels, bytes_per_element,
                                 cfg.scene, cfg.pipeline, repeats);
  std::fputs(cost_report_table(reports).c_str(), stdout);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) {
      throw IoError(IoError::Kind::kMalformed,
                    "bench: cannot write '" + csv_path + "'");
    }
    out << cost_report_csv(reports);
  }
  if (!json_path.empty()) {
    nlohmann::json j = nlohmann::json::array();
    for (const CostReport& r : reports) {
      j.push_back({{"range_m", r.range_m},
                   {"dense_cells", r.dense_cells},
                   {"dense_bytes", r.dense_bytes},
                   {"sparse_live", r.sparse_live},
                   {"n_points", r.n_points},
                   {"n_voxels", r.n_voxels},
                   {"n_queries", r.n_queries},
                   {"wall_ms", r.wall_ms}});
    }
    std::ofstream out(json_path);
    if (!out) {
      throw IoError(IoError::Kind::kMalformed,
                    "bench: cannot write '" + json_path + "'");
    }
    out << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse bi-modal LiDAR-camera detection pipeline"};
  app.require_subcommand(1);

  std::string config_path, scenes_dir, out_dir, detections_dir, out_path;
  std::string csv_path, json_path;
  int n_scenes = 1;
  std::optional<std::uint64_t> seed;
  std::vector<double> thresholds, ranges;
  double cell_m = 0.2;
  int channels = 128, bytes_per_element = 4, repeats = 5;

  auto* config = app.add_subcommand("config", "Print the default run config");
  config->add_option("--out", out_path, "Write to a file instead of stdout");

  auto* synth = app.add_subcommand("synth", "Generate and write scenes");
  synth->add_option("--config", config_path, "Run config JSON");
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("--n-scenes", n_scenes, "Number of scenes")->required();
  synth->add_option("--seed", seed, "Seed override");

  auto* detect = app.add_subcommand("detect", "Run the detection pipeline");
  detect->add_option("--config", config_path, "Run config JSON");
  detect->add_option("--scenes", scenes_dir, "Scene directory")->required();
  detect->add_option("--out", out_dir, "Output directory")->required();
  detect->add_option("--seed", seed, "Seed override");

  auto* assign = app.add_subcommand("assign", "Dump assignment tables");
  assign->add_option("--config", config_path, "Run config JSON");
  assign->add_option("--scenes", scenes_dir, "Scene directory")->required();
  assign->add_option("--out", out_path, "Optional JSON output path");
  assign->add_option("--seed", seed, "Seed override");

  auto* eval = app.add_subcommand("eval", "Evaluate detections against GT");
  eval->add_option("--detections", detections_dir, "Detections directory")
      ->required();
  eval->add_option("--scenes", scenes_dir, "Scene directory")->required();
  eval->add_option("--out", out_path, "Optional JSON output path");
  eval->add_option("--thresholds", thresholds, "BEV distance thresholds (m)");

  auto* bench = app.add_subcommand("bench", "Range-scaling cost benchmark");
  bench->add_option("--config", config_path, "Run config JSON");
  bench->add_option("--ranges", ranges, "Perception ranges (m)");
  bench->add_option("--cell", cell_m, "Dense BEV cell size (m)");
  bench->add_option("--channels", channels, "Dense BEV channels");
  bench->add_option("--bytes-per-element", bytes_per_element,
                    "Bytes per dense element");
  bench->add_option("--repeats", repeats, "Timing repeats (median)");
  bench->add_option("--out-csv", csv_path, "CSV output path");
  bench->add_option("--out-json", json_path, "JSON output path");
  bench->add_option("--seed", seed, "Seed override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (config->parsed()) {
      return cmd_config(out_path);
    }
    if (synth->parsed()) {
      return cmd_synth(config_path, out_dir, n_scenes, seed);
    }
    if (detect->parsed()) {
      return cmd_detect(config_path, scenes_dir, out_dir, seed);
    }
    if (assign->parsed()) {
      return cmd_assign(config_path, scenes_dir, out_path, seed);
    }
    if (eval->parsed()) {
      return cmd_eval(detections_dir, scenes_dir, out_path, thresholds);
    }
    if (bench->parsed()) {
      return cmd_bench(config_path, ranges, cell_m, channels,
                       bytes_per_element, repeats, csv_path, json_path, seed);
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == IoError::Kind::kMalformed ? kExitMalformed
                                                 : kExitConstraint;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConstraint;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConstraint;
  }
  return 0;
}
