#include "sparsefusion/geom.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sparsefusion {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kMinProjectionDepth = 1e-6;
constexpr double kRankDeficientRatio = 1e-6;
}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double angular_distance(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

Mat3 Mat3::rotation_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
  return r;
}

Mat3 Mat3::axis_angle(const Vec3& unit_axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  const double ax = unit_axis.x, ay = unit_axis.y, az = unit_axis.z;
  Mat3 r;
  r.m = {t * ax * ax + c,      t * ax * ay - s * az, t * ax * az + s * ay,
         t * ax * ay + s * az, t * ay * ay + c,      t * ay * az - s * ax,
         t * ax * az - s * ay, t * ay * az + s * ax, t * az * az + c};
  return r;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += m[i * 3 + k] * o.m[k * 3 + j];
      r.m[i * 3 + j] = acc;
    }
  }
  return r;
}

Mat3 Mat3::transposed() const {
  Mat3 r;
  r.m = {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
  return r;
}

double Mat3::determinant() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Box3::Box3(const Vec3& center_, double w_, double l_, double h_, double yaw_)
    : center(center_), w(w_), l(l_), h(h_), yaw(wrap_angle(yaw_)) {
  if (!(w > 0.0) || !(l > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("Box3: dims must be positive");
  }
  if (!std::isfinite(center.x) || !std::isfinite(center.y) ||
      !std::isfinite(center.z)) {
    throw std::invalid_argument("Box3: center must be finite");
  }
}

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw std::invalid_argument("CameraModel: fx, fy must be positive");
  }
  if (image_w <= 0 || image_h <= 0) {
    throw std::invalid_argument("CameraModel: image dims must be positive");
  }
  const Mat3 should_be_identity =
      world_to_cam_rotation * world_to_cam_rotation.transposed();
  const Mat3 eye = Mat3::identity();
  for (int i = 0; i < 9; ++i) {
    if (std::abs(should_be_identity.m[i] - eye.m[i]) > 1e-9) {
      throw std::invalid_argument("CameraModel: rotation not orthonormal");
    }
  }
  if (std::abs(world_to_cam_rotation.determinant() - 1.0) > 1e-9) {
    throw std::invalid_argument("CameraModel: rotation determinant != 1");
  }
}

std::optional<PixelPoint> project(const Vec3& p, const CameraModel& cam) {
  const Vec3 c = cam.world_to_cam_rotation * p + cam.world_to_cam_translation;
  if (c.z <= kMinProjectionDepth) return std::nullopt;
  return PixelPoint{cam.fx * c.x / c.z + cam.cx, cam.fy * c.y / c.z + cam.cy,
                    c.z};
}

Vec3 unproject(double u, double v, double depth, const CameraModel& cam) {
  if (!(depth > 0.0)) {
    throw std::invalid_argument("unproject: depth must be positive");
  }
  const Vec3 c{(u - cam.cx) / cam.fx * depth, (v - cam.cy) / cam.fy * depth,
               depth};
  return cam.world_to_cam_rotation.transposed() *
         (c - cam.world_to_cam_translation);
}

bool point_in_box3(const Vec3& p, const Box3& b) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double dx = p.x - b.center.x;
  const double dy = p.y - b.center.y;
  const double dz = p.z - b.center.z;
  const double lx = c * dx + s * dy;   // rotate by -yaw
  const double ly = -s * dx + c * dy;
  return std::abs(lx) <= 0.5 * b.w && std::abs(ly) <= 0.5 * b.l &&
         std::abs(dz) <= 0.5 * b.h;
}

std::array<Vec3, 8> box3_corners(const Box3& b) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  std::array<Vec3, 8> out;
  for (int i = 0; i < 8; ++i) {
    const double lx = (i & 1 ? 0.5 : -0.5) * b.w;
    const double ly = (i & 2 ? 0.5 : -0.5) * b.l;
    const double lz = (i & 4 ? 0.5 : -0.5) * b.h;
    out[i] = {b.center.x + c * lx - s * ly, b.center.y + s * lx + c * ly,
              b.center.z + lz};
  }
  return out;
}

std::optional<Box2> project_box3(const Box3& b, const CameraModel& cam) {
  Box2 hull{std::numeric_limits<double>::max(),
            std::numeric_limits<double>::max(),
            std::numeric_limits<double>::lowest(),
            std::numeric_limits<double>::lowest()};
  bool any = false;
  for (const Vec3& corner : box3_corners(b)) {
    const auto px = project(corner, cam);
    if (!px) continue;
    any = true;
    hull.min_x = std::min(hull.min_x, px->u);
    hull.min_y = std::min(hull.min_y, px->v);
    hull.max_x = std::max(hull.max_x, px->u);
    hull.max_y = std::max(hull.max_y, px->v);
  }
  if (!any) return std::nullopt;
  return hull;
}

double iou2d(const Box2& a, const Box2& b) {
  const double iw =
      std::max(0.0, std::min(a.max_x, b.max_x) - std::max(a.min_x, b.min_x));
  const double ih =
      std::max(0.0, std::min(a.max_y, b.max_y) - std::max(a.min_y, b.min_y));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

namespace {

Box3 fit_axis_aligned(const std::vector<Vec3>& points) {
  double min_x = points[0].x, max_x = points[0].x;
  double min_y = points[0].y, max_y = points[0].y;
  double min_z = points[0].z, max_z = points[0].z;
  for (const Vec3& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
    min_z = std::min(min_z, p.z);
    max_z = std::max(max_z, p.z);
  }
  return Box3({0.5 * (min_x + max_x), 0.5 * (min_y + max_y),
               0.5 * (min_z + max_z)},
              std::max(max_x - min_x, kMinBoxDim),
              std::max(max_y - min_y, kMinBoxDim),
              std::max(max_z - min_z, kMinBoxDim), 0.0);
}

}  // namespace

Box3 fit_box_pca(const std::vector<Vec3>& points, std::size_t min_points) {
  if (points.empty()) {
    throw std::invalid_argument("fit_box_pca: empty point set");
  }
  if (points.size() < min_points) return fit_axis_aligned(points);

  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const Vec3& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double cxx = 0.0, cyy = 0.0, cxy = 0.0;
  for (const Vec3& p : points) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    cxx += dx * dx;
    cyy += dy * dy;
    cxy += dx * dy;
  }
  cxx /= n;
  cyy /= n;
  cxy /= n;

  // Closed-form eigenvalues of the symmetric 2x2 covariance.
  const double half_trace = 0.5 * (cxx + cyy);
  const double disc =
      std::sqrt(std::max(0.0, 0.25 * (cxx - cyy) * (cxx - cyy) + cxy * cxy));
  const double eig_max = half_trace + disc;
  const double eig_min = half_trace - disc;
  if (!(eig_max > 0.0) || eig_min / eig_max < kRankDeficientRatio) {
    return fit_axis_aligned(points);
  }

  const double yaw = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  double min_x = std::numeric_limits<double>::max(), max_x = -min_x;
  double min_y = std::numeric_limits<double>::max(), max_y = -min_y;
  double min_z = std::numeric_limits<double>::max(), max_z = -min_z;
  for (const Vec3& p : points) {
    const double lx = c * p.x + s * p.y;   // rotate by -yaw
    const double ly = -s * p.x + c * p.y;
    min_x = std::min(min_x, lx);
    max_x = std::max(max_x, lx);
    min_y = std::min(min_y, ly);
    max_y = std::max(max_y, ly);
    min_z = std::min(min_z, p.z);
    max_z = std::max(max_z, p.z);
  }
  const double mid_x = 0.5 * (min_x + max_x);
  const double mid_y = 0.5 * (min_y + max_y);
  return Box3({c * mid_x - s * mid_y, s * mid_x + c * mid_y,
               0.5 * (min_z + max_z)},
              std::max(max_x - min_x, kMinBoxDim),
              std::max(max_y - min_y, kMinBoxDim),
              std::max(max_z - min_z, kMinBoxDim), yaw);
}

Box3 transform_box(const Box3& b, double rot_z, const Vec3& t) {
  const double c = std::cos(rot_z);
  const double s = std::sin(rot_z);
  return Box3({c * b.center.x - s * b.center.y + t.x,
               s * b.center.x + c * b.center.y + t.y, b.center.z + t.z},
              b.w, b.l, b.h, b.yaw + rot_z);
}

}  // namespace sparsefusion
