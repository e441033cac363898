// Copyright 2026 The agmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>

#include "agmap/error.hpp"

namespace agmap {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

/// Pinhole intrinsics with a single focal length (square pixels).
struct CameraIntrinsics {
  double focal_px = 500.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  void validate() const {
    require(std::isfinite(focal_px) && focal_px > 0.0, "focal_px must be positive");
    require(width > 0 && height > 0, "image size must be positive");
    require(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height,
            "principal point must lie inside the image");
  }
};

/// Axis-aligned pixel rectangle, image coordinates with y pointing down.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width_px() const { return x_max - x_min; }
  double height_px() const { return y_max - y_min; }
  Vec2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }

  bool intersects_image(int width, int height) const {
    return x_max > 0.0 && y_max > 0.0 && x_min < width && y_min < height;
  }

  void validate() const {
    require(std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
                std::isfinite(y_max),
            "bounding box coordinates must be finite");
    require(x_min < x_max && y_min < y_max, "degenerate bounding box");
  }

  bool operator==(const BoundingBox&) const = default;
};

/// Planar robot pose: position in the world frame plus heading about +z.
struct Pose {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;

  Pose() = default;
  Pose(Vec3 p, double heading) : position(std::move(p)), yaw(normalize_angle(heading)) {}
  Pose(double x, double y, double z, double heading) : Pose(Vec3(x, y, z), heading) {}

  bool operator==(const Pose& o) const { return position == o.position && yaw == o.yaw; }
};

/// Camera mounting on the robot body. Identity by default.
struct CameraExtrinsics {
  Vec3 translation = Vec3::Zero();
  double yaw_offset = 0.0;

  void validate() const {
    require(translation.allFinite() && std::isfinite(yaw_offset), "extrinsics must be finite");
  }
};

/// Metric distance along the optical axis from a known real-world height:
/// d = f * h_m / h_px.
inline double distance_from_bbox(const BoundingBox& box, const CameraIntrinsics& cam,
                                 double real_height_m) {
  require(std::isfinite(real_height_m) && real_height_m > 0.0,
          "real height must be positive");
  box.validate();
  cam.validate();
  return cam.focal_px * real_height_m / box.height_px();
}

/// Pixel plus depth to a camera-frame point (X right, Y down, Z forward).
inline Vec3 backproject(const Vec2& pixel, double depth_m, const CameraIntrinsics& cam) {
  require(std::isfinite(depth_m) && depth_m > 0.0, "depth must be positive");
  return {(pixel.x() - cam.cx) * depth_m / cam.focal_px,
          (pixel.y() - cam.cy) * depth_m / cam.focal_px, depth_m};
}

inline Vec2 project(const Vec3& p_cam, const CameraIntrinsics& cam) {
  require(p_cam.z() > 0.0, "point is behind the camera");
  return {cam.cx + cam.focal_px * p_cam.x() / p_cam.z(),
          cam.cy + cam.focal_px * p_cam.y() / p_cam.z()};
}

namespace detail {

inline Vec3 rotate_z(const Vec3& p, double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z()};
}

}  // namespace detail

/// Optical frame (X right, Y down, Z forward) to body convention
/// (x forward, y left, z up).
inline Vec3 optical_to_body(const Vec3& p) { return {p.z(), -p.x(), -p.y()}; }
inline Vec3 body_to_optical(const Vec3& p) { return {-p.y(), -p.z(), p.x()}; }

/// Robot-local point to world frame.
inline Vec3 robot_to_world(const Vec3& p_robot, const Pose& robot) {
  return detail::rotate_z(p_robot, robot.yaw) + robot.position;
}

inline Vec3 world_to_robot(const Vec3& p_world, const Pose& robot) {
  return detail::rotate_z(p_world - robot.position, -robot.yaw);
}

inline Vec3 camera_to_world(const Vec3& p_cam, const Pose& robot, const CameraExtrinsics& ext) {
  const Vec3 p_robot = detail::rotate_z(optical_to_body(p_cam), ext.yaw_offset) + ext.translation;
  return robot_to_world(p_robot, robot);
}

inline Vec3 world_to_camera(const Vec3& p_world, const Pose& robot, const CameraExtrinsics& ext) {
  const Vec3 p_robot = world_to_robot(p_world, robot);
  return body_to_optical(detail::rotate_z(p_robot - ext.translation, -ext.yaw_offset));
}

/// World heading of the optical axis.
inline double camera_heading(const Pose& robot, const CameraExtrinsics& ext) {
  return normalize_angle(robot.yaw + ext.yaw_offset);
}

}  // namespace agmap
