// Exact geometric primitives shared by the whole pipeline: pinhole
// projection, rotated-box containment, axis-aligned 2D IoU and PCA box
// fitting. Everything here is a pure function of its arguments.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace sparsefusion {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

// Row-major 3x3 matrix; just enough linear algebra for rigid transforms.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  static Mat3 rotation_z(double angle);
  // Rodrigues rotation about a unit axis (used by tests and rig setup).
  static Mat3 axis_angle(const Vec3& unit_axis, double angle);

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3& o) const;
  Mat3 transposed() const;
  double determinant() const;
};

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);
// Smallest absolute difference between two angles, result in [0, pi].
double angular_distance(double a, double b);

// Oriented 3D box: center, extents (w along local x, l along local y,
// h along z) and yaw about the world z axis. Yaw is wrapped to (-pi, pi]
// at construction; dims must be positive.
struct Box3 {
  Vec3 center;
  double w = 1.0;
  double l = 1.0;
  double h = 1.0;
  double yaw = 0.0;

  Box3() = default;
  Box3(const Vec3& center_, double w_, double l_, double h_, double yaw_);

  double volume() const { return w * l * h; }
};

// Axis-aligned 2D box in pixel coordinates, min/max corners inclusive.
struct Box2 {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }
};

// Pinhole camera: cam_point = world_to_cam_rotation * p + translation,
// +z forward, +x right, +y down in camera frame.
struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  Mat3 world_to_cam_rotation;
  Vec3 world_to_cam_translation;
  int image_w = 0;
  int image_h = 0;

  // Throws std::invalid_argument unless fx,fy > 0, image dims > 0 and the
  // rotation is orthonormal with determinant 1 (checked to 1e-9).
  void validate() const;
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// Projects a world point; absent when camera-frame depth <= 1e-6. The
// returned (u, v) may lie outside the image bounds; callers filter.
std::optional<PixelPoint> project(const Vec3& p, const CameraModel& cam);

// Inverse of project for depth > 0; throws std::invalid_argument otherwise.
Vec3 unproject(double u, double v, double depth, const CameraModel& cam);

// Boundary-inclusive rotated-box containment.
bool point_in_box3(const Vec3& p, const Box3& b);

// The 8 vertices of a box. Corner i carries local signs
// (x: i&1 ? + : -, y: i&2 ? + : -, z: i&4 ? + : -).
std::array<Vec3, 8> box3_corners(const Box3& b);

// Axis-aligned hull of the projected corners with positive depth; absent
// when no corner lies in front of the camera. Not clamped to image bounds.
std::optional<Box2> project_box3(const Box3& b, const CameraModel& cam);

// Intersection-over-union of two axis-aligned boxes; 0 when disjoint or
// when both boxes are zero-area.
double iou2d(const Box2& a, const Box2& b);

// Fits an oriented box to a point set. Yaw is the principal direction of
// the XY covariance; extents are bounds in that frame, floored at 0.05 m
// per dimension. Falls back to an axis-aligned fit when there are fewer
// than min_points or the covariance is rank-deficient (eigenvalue ratio
// below 1e-6). Throws std::invalid_argument on empty input.
Box3 fit_box_pca(const std::vector<Vec3>& points, std::size_t min_points = 3);

// Rigid in-plane motion of a box: rotate by rot_z about the origin, then
// translate. Keeps the yaw-only parameterization valid.
Box3 transform_box(const Box3& b, double rot_z, const Vec3& t);

// Minimum extent assigned to any fitted or decoded box dimension.
inline constexpr double kMinBoxDim = 0.05;

}  // namespace sparsefusion
