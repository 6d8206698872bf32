// JSON file formats: run configuration, scenes (bitmaps run-length
// encoded) and detections. Every file carries a schema_version field and
// round-trips losslessly; writing the same data twice produces identical
// bytes.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sparsefusion/eval.hpp"
#include "sparsefusion/pipeline.hpp"
#include "sparsefusion/scene.hpp"

namespace sparsefusion {

inline constexpr int kSchemaVersion = 1;

// kMalformed: unreadable/ill-typed input (CLI exit 2).
// kConstraint: well-formed input violating a module invariant (CLI exit 3).
class IoError : public std::runtime_error {
 public:
  enum class Kind { kMalformed, kConstraint };
  IoError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct RunConfig {
  SceneConfig scene;
  PipelineConfig pipeline;
};

// Defaults mirroring the documented knob values, with a three-class set
// and a six-camera surround rig.
RunConfig default_run_config();

RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& cfg);
void save_run_config(const RunConfig& cfg, const std::string& path);

void save_scene(const Scene& scene, const std::string& path);
Scene load_scene(const std::string& path);

struct DetectionFile {
  std::string source_scene;  // stem of the scene file
  PipelineStats stats;
  std::vector<Detection> detections;
};

void save_detections(const DetectionFile& det, const std::string& path);
DetectionFile load_detections(const std::string& path);

std::string eval_result_to_json(const EvalResult& result);
std::string format_eval_result(const EvalResult& result);

}  // namespace sparsefusion
