#include "sparsefusion/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sparsefusion {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* field, const char* context) {
  const auto it = j.find(field);
  if (it == j.end()) {
    throw IoError(IoError::Kind::kMalformed,
                  std::string(context) + ": missing field '" + field + "'");
  }
  return *it;
}

template <typename T>
T field_as(const json& j, const char* field, const char* context) {
  try {
    return require(j, field, context).get<T>();
  } catch (const json::exception&) {
    throw IoError(IoError::Kind::kMalformed, std::string(context) +
                                                 ": field '" + field +
                                                 "' has the wrong type");
  }
}

void check_schema(const json& j, const char* context) {
  const int version = field_as<int>(j, "schema_version", context);
  if (version != kSchemaVersion) {
    throw IoError(IoError::Kind::kMalformed,
                  std::string(context) + ": schema_version " +
                      std::to_string(version) + " != supported " +
                      std::to_string(kSchemaVersion));
  }
}

json write_vec3(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 read_vec3(const json& j, const char* context) {
  if (!j.is_array() || j.size() != 3) {
    throw IoError(IoError::Kind::kMalformed,
                  std::string(context) + ": expected a 3-array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json write_box3(const Box3& b) {
  return json{{"center", write_vec3(b.center)},
              {"dims", json::array({b.w, b.l, b.h})},
              {"yaw", b.yaw}};
}

Box3 read_box3(const json& j, const char* context) {
  const Vec3 center = read_vec3(require(j, "center", context), context);
  const json& dims = require(j, "dims", context);
  if (!dims.is_array() || dims.size() != 3) {
    throw IoError(IoError::Kind::kMalformed,
                  std::string(context) + ": dims must be a 3-array");
  }
  try {
    return Box3(center, dims[0].get<double>(), dims[1].get<double>(),
                dims[2].get<double>(),
                field_as<double>(j, "yaw", context));
  } catch (const std::invalid_argument& e) {
    throw IoError(IoError::Kind::kConstraint,
                  std::string(context) + ": " + e.what());
  }
}

json write_camera(const CameraModel& cam) {
  return json{{"fx", cam.fx},
              {"fy", cam.fy},
              {"cx", cam.cx},
              {"cy", cam.cy},
              {"rotation", cam.world_to_cam_rotation.m},
              {"translation", write_vec3(cam.world_to_cam_translation)},
              {"image_w", cam.image_w},
              {"image_h", cam.image_h}};
}

CameraModel read_camera(const json& j, const char* context) {
  CameraModel cam;
  cam.fx = field_as<double>(j, "fx", context);
  cam.fy = field_as<double>(j, "fy", context);
  cam.cx = field_as<double>(j, "cx", context);
  cam.cy = field_as<double>(j, "cy", context);
  cam.world_to_cam_rotation.m =
      field_as<std::array<double, 9>>(j, "rotation", context);
  cam.world_to_cam_translation =
      read_vec3(require(j, "translation", context), context);
  cam.image_w = field_as<int>(j, "image_w", context);
  cam.image_h = field_as<int>(j, "image_h", context);
  try {
    cam.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(IoError::Kind::kConstraint,
                  std::string(context) + ": " + e.what());
  }
  return cam;
}

json write_class(const ClassSpec& cs) {
  return json{{"class_id", cs.class_id},
              {"name", cs.name},
              {"size_prior", write_vec3(cs.size_prior)},
              {"size_jitter", cs.size_jitter},
              {"surface_point_rate", cs.surface_point_rate}};
}

ClassSpec read_class(const json& j, const char* context) {
  ClassSpec cs;
  cs.class_id = field_as<int>(j, "class_id", context);
  cs.name = field_as<std::string>(j, "name", context);
  cs.size_prior = read_vec3(require(j, "size_prior", context), context);
  cs.size_jitter = field_as<double>(j, "size_jitter", context);
  cs.surface_point_rate = field_as<double>(j, "surface_point_rate", context);
  return cs;
}

json write_mask_noise(const MaskNoise& n) {
  return json{{"drop_prob", n.drop_prob},
              {"dilate_px", n.dilate_px},
              {"erode_px", n.erode_px},
              {"spurious_prob", n.spurious_prob},
              {"merge_prob", n.merge_prob}};
}

MaskNoise read_mask_noise(const json& j, const char* context) {
  MaskNoise n;
  n.drop_prob = field_as<double>(j, "drop_prob", context);
  n.dilate_px = field_as<int>(j, "dilate_px", context);
  n.erode_px = field_as<int>(j, "erode_px", context);
  n.spurious_prob = field_as<double>(j, "spurious_prob", context);
  n.merge_prob = field_as<double>(j, "merge_prob", context);
  for (double p : {n.drop_prob, n.spurious_prob, n.merge_prob}) {
    if (p < 0.0 || p > 1.0) {
      throw IoError(IoError::Kind::kConstraint,
                    std::string(context) +
                        ": mask noise probabilities must lie in [0, 1]");
    }
  }
  if (n.dilate_px < 0 || n.erode_px < 0) {
    throw IoError(IoError::Kind::kConstraint,
                  std::string(context) + ": dilate_px/erode_px must be >= 0");
  }
  return n;
}

std::string gate_name(AssignmentGate gate) {
  switch (gate) {
    case AssignmentGate::kQueryInBox:
      return "query_in_box";
    case AssignmentGate::kTwoRound:
      return "two_round";
    default:
      return "off";
  }
}

AssignmentGate gate_from_name(const std::string& name, const char* context) {
  if (name == "off") return AssignmentGate::kOff;
  if (name == "query_in_box") return AssignmentGate::kQueryInBox;
  if (name == "two_round") return AssignmentGate::kTwoRound;
  throw IoError(IoError::Kind::kMalformed,
                std::string(context) + ": field 'assignment_gate' must be "
                                       "off, query_in_box or two_round");
}

json load_json_file(const std::string& path, const char* context) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(IoError::Kind::kMalformed,
                  std::string(context) + ": cannot open '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(IoError::Kind::kMalformed, std::string(context) + ": '" +
                                                 path + "' is not valid JSON (" +
                                                 e.what() + ")");
  }
}

void write_file(const std::string& path, const std::string& contents,
                const char* context) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(IoError::Kind::kMalformed,
                  std::string(context) + ": cannot write '" + path + "'");
  }
  out << contents;
}

}  // namespace

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.scene.range_m = 54.0;
  cfg.scene.n_objects = 8;
  cfg.scene.background_points = 2000;
  cfg.scene.point_dropout = 0.0;
  cfg.scene.distance_attenuation_exp = 2.0;
  cfg.scene.min_center_gap = 3.0;
  cfg.scene.seed = 0;
  cfg.scene.classes = {
      {0, "vehicle", {4.5, 1.9, 1.6}, 0.10, 30.0},
      {1, "cyclist", {1.8, 0.7, 1.4}, 0.10, 60.0},
      {2, "pedestrian", {0.7, 0.7, 1.7}, 0.10, 80.0},
  };
  cfg.scene.cameras = make_camera_rig(6, 800, 450, 70.0, 1.6);
  return cfg;
}

namespace {

json write_scene_config(const SceneConfig& sc) {
  json classes = json::array();
  for (const ClassSpec& cs : sc.classes) classes.push_back(write_class(cs));
  json cameras = json::array();
  for (const CameraModel& cam : sc.cameras) cameras.push_back(write_camera(cam));
  return json{{"range_m", sc.range_m},
              {"n_objects", sc.n_objects},
              {"classes", classes},
              {"cameras", cameras},
              {"background_points", sc.background_points},
              {"point_dropout", sc.point_dropout},
              {"distance_attenuation_exp", sc.distance_attenuation_exp},
              {"min_center_gap", sc.min_center_gap}};
}

SceneConfig read_scene_config(const json& j, const char* context) {
  SceneConfig sc;
  sc.range_m = field_as<double>(j, "range_m", context);
  sc.n_objects = field_as<int>(j, "n_objects", context);
  for (const json& c : require(j, "classes", context)) {
    sc.classes.push_back(read_class(c, context));
  }
  if (j.contains("cameras")) {
    for (const json& c : j["cameras"]) {
      sc.cameras.push_back(read_camera(c, context));
    }
  } else if (j.contains("camera_rig")) {
    const json& rig = j["camera_rig"];
    sc.cameras = make_camera_rig(field_as<int>(rig, "n_cameras", context),
                                 field_as<int>(rig, "image_w", context),
                                 field_as<int>(rig, "image_h", context),
                                 field_as<double>(rig, "hfov_deg", context),
                                 field_as<double>(rig, "height_m", context));
  }
  sc.background_points = field_as<int>(j, "background_points", context);
  sc.point_dropout = field_as<double>(j, "point_dropout", context);
  sc.distance_attenuation_exp =
      field_as<double>(j, "distance_attenuation_exp", context);
  sc.min_center_gap = field_as<double>(j, "min_center_gap", context);
  return sc;
}

json write_pipeline_config(const PipelineConfig& pc) {
  return json{{"voxel_size", write_vec3(pc.voxel_size)},
              {"connect_radius_m", pc.connect_radius_m},
              {"min_cluster_points", pc.min_cluster_points},
              {"fg_threshold", pc.fg_threshold},
              {"flip_prob", pc.flip_prob},
              {"vote_sigma_m", pc.vote_sigma_m},
              {"frustum_depth_min_m", pc.frustum_depth_min_m},
              {"frustum_depth_max_m", pc.frustum_depth_max_m},
              {"score_floor", pc.score_floor},
              {"iou2d_threshold", pc.iou2d_threshold},
              {"dedup_dist_m", pc.dedup_dist_m},
              {"eval_thresholds_m", pc.eval_thresholds_m},
              {"use_lidar_queries", pc.use_lidar_queries},
              {"use_camera_queries", pc.use_camera_queries},
              {"assignment_gate", gate_name(pc.assignment_gate)},
              {"mask_noise", write_mask_noise(pc.mask_noise)}};
}

PipelineConfig read_pipeline_config(const json& j, const char* context) {
  PipelineConfig pc;
  pc.voxel_size = read_vec3(require(j, "voxel_size", context), context);
  pc.connect_radius_m = field_as<double>(j, "connect_radius_m", context);
  pc.min_cluster_points =
      field_as<std::size_t>(j, "min_cluster_points", context);
  pc.fg_threshold = field_as<double>(j, "fg_threshold", context);
  pc.flip_prob = field_as<double>(j, "flip_prob", context);
  pc.vote_sigma_m = field_as<double>(j, "vote_sigma_m", context);
  pc.frustum_depth_min_m = field_as<double>(j, "frustum_depth_min_m", context);
  pc.frustum_depth_max_m = field_as<double>(j, "frustum_depth_max_m", context);
  pc.score_floor = field_as<double>(j, "score_floor", context);
  pc.iou2d_threshold = field_as<double>(j, "iou2d_threshold", context);
  pc.dedup_dist_m = field_as<double>(j, "dedup_dist_m", context);
  pc.eval_thresholds_m =
      field_as<std::vector<double>>(j, "eval_thresholds_m", context);
  pc.use_lidar_queries = field_as<bool>(j, "use_lidar_queries", context);
  pc.use_camera_queries = field_as<bool>(j, "use_camera_queries", context);
  pc.assignment_gate = gate_from_name(
      field_as<std::string>(j, "assignment_gate", context), context);
  pc.mask_noise = read_mask_noise(require(j, "mask_noise", context), context);
  try {
    pc.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(IoError::Kind::kConstraint,
                  std::string(context) + ": " + e.what());
  }
  return pc;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) {
  const json j{{"schema_version", kSchemaVersion},
               {"seed", cfg.pipeline.seed},
               {"scene", write_scene_config(cfg.scene)},
               {"pipeline", write_pipeline_config(cfg.pipeline)}};
  return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::string& path) {
  const char* context = "config";
  const json j = load_json_file(path, context);
  check_schema(j, context);
  RunConfig cfg;
  cfg.scene = read_scene_config(require(j, "scene", context), context);
  cfg.pipeline =
      read_pipeline_config(require(j, "pipeline", context), context);
  const auto seed = field_as<std::uint64_t>(j, "seed", context);
  cfg.scene.seed = seed;
  cfg.pipeline.seed = seed;
  return cfg;
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
  write_file(path, run_config_to_json(cfg), "config");
}

void save_scene(const Scene& scene, const std::string& path) {
  json gt = json::array();
  for (const GtObject& g : scene.gt) {
    json obj = write_box3(g.box);
    obj["class_id"] = g.class_id;
    obj["instance_id"] = g.instance_id;
    obj["point_rate"] = g.point_rate;
    gt.push_back(std::move(obj));
  }
  json points = json::array();
  for (const ScenePoint& p : scene.points) {
    points.push_back(json::array(
        {p.position.x, p.position.y, p.position.z, p.instance_id}));
  }
  json cameras = json::array();
  for (const CameraModel& cam : scene.cameras) {
    cameras.push_back(write_camera(cam));
  }
  json masks = json::array();
  for (std::size_t c = 0; c < scene.masks.size(); ++c) {
    for (const InstanceMask& m : scene.masks[c]) {
      masks.push_back(json{
          {"camera_index", m.camera_index},
          {"instance_id", m.instance_id},
          {"class_id", m.class_id},
          {"width", m.bitmap.width()},
          {"height", m.bitmap.height()},
          {"rle", m.bitmap.run_length_encode()},
          {"bbox2",
           json::array({m.bbox2.min_x, m.bbox2.min_y, m.bbox2.max_x,
                        m.bbox2.max_y})}});
    }
  }
  const json j{{"schema_version", kSchemaVersion},
               {"seed", scene.seed},
               {"range_m", scene.range_m},
               {"gt", std::move(gt)},
               {"points", std::move(points)},
               {"cameras", std::move(cameras)},
               {"masks", std::move(masks)}};
  write_file(path, j.dump() + "\n", "scene");
}

Scene load_scene(const std::string& path) {
  const char* context = "scene";
  const json j = load_json_file(path, context);
  check_schema(j, context);
  Scene scene;
  scene.seed = field_as<std::uint64_t>(j, "seed", context);
  scene.range_m = field_as<double>(j, "range_m", context);
  for (const json& g : require(j, "gt", context)) {
    GtObject obj;
    obj.box = read_box3(g, context);
    obj.class_id = field_as<int>(g, "class_id", context);
    obj.instance_id = field_as<int>(g, "instance_id", context);
    obj.point_rate = field_as<double>(g, "point_rate", context);
    scene.gt.push_back(std::move(obj));
  }
  for (const json& p : require(j, "points", context)) {
    if (!p.is_array() || p.size() != 4) {
      throw IoError(IoError::Kind::kMalformed,
                    "scene: each point must be [x, y, z, instance_id]");
    }
    scene.points.push_back({{p[0].get<double>(), p[1].get<double>(),
                             p[2].get<double>()},
                            p[3].get<int>()});
  }
  for (const json& c : require(j, "cameras", context)) {
    scene.cameras.push_back(read_camera(c, context));
  }
  scene.masks.resize(scene.cameras.size());
  for (const json& m : require(j, "masks", context)) {
    InstanceMask mask;
    mask.camera_index = field_as<int>(m, "camera_index", context);
    if (mask.camera_index < 0 ||
        mask.camera_index >= static_cast<int>(scene.cameras.size())) {
      throw IoError(IoError::Kind::kConstraint,
                    "scene: mask camera_index out of range");
    }
    mask.instance_id = field_as<int>(m, "instance_id", context);
    mask.class_id = field_as<int>(m, "class_id", context);
    const int width = field_as<int>(m, "width", context);
    const int height = field_as<int>(m, "height", context);
    try {
      mask.bitmap = Bitmap::run_length_decode(
          width, height,
          field_as<std::vector<std::uint32_t>>(m, "rle", context));
    } catch (const std::invalid_argument& e) {
      throw IoError(IoError::Kind::kConstraint,
                    std::string("scene: ") + e.what());
    }
    if (!refresh_mask_bounds(mask)) {
      throw IoError(IoError::Kind::kConstraint,
                    "scene: mask bitmap has no set bits");
    }
    scene.masks[mask.camera_index].push_back(std::move(mask));
  }
  return scene;
}

void save_detections(const DetectionFile& det, const std::string& path) {
  json list = json::array();
  for (const Detection& d : det.detections) {
    json obj = write_box3(d.box);
    obj["class_id"] = d.class_id;
    obj["score"] = d.score;
    obj["provenance"] =
        d.provenance == Modality::kCamera ? "camera" : "lidar";
    list.push_back(std::move(obj));
  }
  const json counts{{"n_points", det.stats.n_points},
                    {"n_voxels", det.stats.n_voxels},
                    {"n_votes", det.stats.n_votes},
                    {"n_lidar_queries", det.stats.n_lidar_queries},
                    {"n_camera_queries", det.stats.n_camera_queries},
                    {"query_member_total", det.stats.query_member_total},
                    {"n_detections_pre_dedup",
                     det.stats.n_detections_pre_dedup},
                    {"n_detections", det.stats.n_detections}};
  const json j{{"schema_version", kSchemaVersion},
               {"source_scene", det.source_scene},
               {"counts", counts},
               {"detections", std::move(list)}};
  write_file(path, j.dump(2) + "\n", "detections");
}

DetectionFile load_detections(const std::string& path) {
  const char* context = "detections";
  const json j = load_json_file(path, context);
  check_schema(j, context);
  DetectionFile out;
  out.source_scene = field_as<std::string>(j, "source_scene", context);
  const json& counts = require(j, "counts", context);
  out.stats.n_points = field_as<std::size_t>(counts, "n_points", context);
  out.stats.n_voxels = field_as<std::size_t>(counts, "n_voxels", context);
  out.stats.n_votes = field_as<std::size_t>(counts, "n_votes", context);
  out.stats.n_lidar_queries =
      field_as<std::size_t>(counts, "n_lidar_queries", context);
  out.stats.n_camera_queries =
      field_as<std::size_t>(counts, "n_camera_queries", context);
  out.stats.query_member_total =
      field_as<std::size_t>(counts, "query_member_total", context);
  out.stats.n_detections_pre_dedup =
      field_as<std::size_t>(counts, "n_detections_pre_dedup", context);
  out.stats.n_detections =
      field_as<std::size_t>(counts, "n_detections", context);
  for (const json& d : require(j, "detections", context)) {
    Detection det;
    det.box = read_box3(d, context);
    det.class_id = field_as<int>(d, "class_id", context);
    det.score = field_as<double>(d, "score", context);
    const auto provenance = field_as<std::string>(d, "provenance", context);
    if (provenance == "lidar") {
      det.provenance = Modality::kLidar;
    } else if (provenance == "camera") {
      det.provenance = Modality::kCamera;
    } else {
      throw IoError(IoError::Kind::kMalformed,
                    "detections: field 'provenance' must be lidar or camera");
    }
    if (det.score < 0.0 || det.score > 1.0 || !std::isfinite(det.score)) {
      throw IoError(IoError::Kind::kConstraint,
                    "detections: score outside [0, 1]");
    }
    out.detections.push_back(std::move(det));
  }
  return out;
}

std::string eval_result_to_json(const EvalResult& result) {
  json curves = json::array();
  for (const auto& [key, curve] : result.curves) {
    curves.push_back(json{{"class_id", key.first},
                          {"threshold_m", result.thresholds_m[key.second]},
                          {"ap", curve.ap},
                          {"recall", curve.recall},
                          {"precision", curve.precision}});
  }
  const json j{{"schema_version", kSchemaVersion},
               {"thresholds_m", result.thresholds_m},
               {"mean_ap", result.mean_ap},
               {"recall", result.recall},
               {"recall_lidar", result.recall_lidar},
               {"recall_camera", result.recall_camera},
               {"total_gt", result.total_gt},
               {"curves", std::move(curves)}};
  return j.dump(2) + "\n";
}

std::string format_eval_result(const EvalResult& result) {
  std::ostringstream os;
  char row[160];
  os << "class  threshold_m        AP\n";
  for (const auto& [key, curve] : result.curves) {
    std::snprintf(row, sizeof(row), "%5d %12.2f %9.4f\n", key.first,
                  result.thresholds_m[key.second], curve.ap);
    os << row;
  }
  std::snprintf(row, sizeof(row), "mean AP: %.4f over %zu GT objects\n",
                result.mean_ap, result.total_gt);
  os << row;
  for (std::size_t t = 0; t < result.thresholds_m.size(); ++t) {
    std::snprintf(row, sizeof(row),
                  "recall@%.1fm: %.4f (lidar %.4f, camera %.4f)\n",
                  result.thresholds_m[t], result.recall[t],
                  result.recall_lidar[t], result.recall_camera[t]);
    os << row;
  }
  return os.str();
}

}  // namespace sparsefusion
