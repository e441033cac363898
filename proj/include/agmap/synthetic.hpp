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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "agmap/catalog.hpp"
#include "agmap/depth.hpp"
#include "agmap/detection.hpp"
#include "agmap/geometry.hpp"
#include "agmap/json_util.hpp"
#include "agmap/semantic_map.hpp"

namespace agmap {

struct SceneObject {
  std::string label;
  Vec3 position = Vec3::Zero();  // box center, world frame
  Dimensions dimensions;
};

struct SyntheticCamera {
  CameraIntrinsics intrinsics;
  CameraExtrinsics extrinsics;
  Pose pose;
};

/// Ground-truth scene for the projection oracle. Each object is imaged as a
/// camera-facing rectangle at the depth of its center, so the pinhole
/// relation between pixel height and depth holds exactly.
struct SyntheticScene {
  std::vector<SceneObject> objects;
  SyntheticCamera camera;
  double background_depth_m = 50.0;

  void validate() const {
    camera.intrinsics.validate();
    camera.extrinsics.validate();
    require(background_depth_m > 0.0, "background depth must be positive");
    for (const auto& o : objects) {
      require(o.dimensions.valid(), "scene object dimensions must be positive: " + o.label);
      require(o.position.allFinite(), "scene object position must be finite: " + o.label);
    }
  }

  static SyntheticScene from_json(const Json& doc);
  Json to_json() const;
};

namespace synthetic_detail {

struct Billboard {
  size_t object = 0;
  double depth = 0.0;
  BoundingBox rect;  // unclipped
};

inline std::vector<Billboard> billboards(const SyntheticScene& scene) {
  const auto& cam = scene.camera.intrinsics;
  const double heading = camera_heading(scene.camera.pose, scene.camera.extrinsics);
  const double s = std::abs(std::sin(heading));
  const double c = std::abs(std::cos(heading));
  std::vector<Billboard> out;
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    const Vec3 pc = world_to_camera(o.position, scene.camera.pose, scene.camera.extrinsics);
    if (pc.z() <= 1e-9) continue;  // behind the camera
    // Lateral extent of the axis-aligned footprint as seen along the heading.
    const double lateral = o.dimensions.w * s + o.dimensions.d * c;
    const double k = cam.focal_px / pc.z();
    BoundingBox r{cam.cx + k * (pc.x() - 0.5 * lateral), cam.cy + k * (pc.y() - 0.5 * o.dimensions.h),
                  cam.cx + k * (pc.x() + 0.5 * lateral), cam.cy + k * (pc.y() + 0.5 * o.dimensions.h)};
    if (!r.intersects_image(cam.width, cam.height)) continue;
    out.push_back({i, pc.z(), r});
  }
  return out;
}

struct Raster {
  DepthMap depth;
  std::vector<int> owner;  // index into billboards, -1 for background
};

inline Raster rasterize(const SyntheticScene& scene, const std::vector<Billboard>& boards) {
  const auto& cam = scene.camera.intrinsics;
  Raster r{DepthMap(cam.width, cam.height, scene.background_depth_m, DepthScale::kMetric),
           std::vector<int>(static_cast<size_t>(cam.width) * cam.height, -1)};
  for (size_t b = 0; b < boards.size(); ++b) {
    const Mask m = Mask::from_box(boards[b].rect, cam.width, cam.height);
    for (int y = 0; y < cam.height; ++y)
      for (int x = 0; x < cam.width; ++x) {
        if (!m.test(x, y)) continue;
        auto& owner = r.owner[static_cast<size_t>(y) * cam.width + x];
        if (owner < 0 || boards[b].depth < boards[static_cast<size_t>(owner)].depth) {
          owner = static_cast<int>(b);
          r.depth.at(x, y) = boards[b].depth;
        }
      }
  }
  return r;
}

}  // namespace synthetic_detail

/// Exact detections for every object with at least one visible pixel. Boxes
/// are sub-pixel and clipped to the image; masks cover the visible pixels.
inline std::vector<Detection> synthetic_render(const SyntheticScene& scene) {
  scene.validate();
  const auto boards = synthetic_detail::billboards(scene);
  const auto raster = synthetic_detail::rasterize(scene, boards);
  const auto& cam = scene.camera.intrinsics;
  std::vector<Detection> out;
  for (size_t b = 0; b < boards.size(); ++b) {
    Mask mask(cam.width, cam.height);
    bool visible = false;
    for (int y = 0; y < cam.height; ++y)
      for (int x = 0; x < cam.width; ++x)
        if (raster.owner[static_cast<size_t>(y) * cam.width + x] == static_cast<int>(b)) {
          mask.set(x, y);
          visible = true;
        }
    if (!visible) continue;
    BoundingBox box = boards[b].rect;
    box.x_min = std::max(box.x_min, 0.0);
    box.y_min = std::max(box.y_min, 0.0);
    box.x_max = std::min(box.x_max, static_cast<double>(cam.width));
    box.y_max = std::min(box.y_max, static_cast<double>(cam.height));
    out.push_back({scene.objects[boards[b].object].label, box, 1.0, std::move(mask)});
  }
  return out;
}

/// Metric depth: nearest object surface where one projects, background
/// elsewhere.
inline DepthMap synthetic_depth(const SyntheticScene& scene) {
  scene.validate();
  return synthetic_detail::rasterize(scene, synthetic_detail::billboards(scene)).depth;
}

/// Camera-frame ground truth for a scene object (useful in tests).
inline Vec3 scene_object_in_camera(const SyntheticScene& scene, size_t i) {
  return world_to_camera(scene.objects.at(i).position, scene.camera.pose, scene.camera.extrinsics);
}

class SyntheticBackend : public DetectorBackend {
 public:
  explicit SyntheticBackend(SyntheticScene scene) : scene_(std::move(scene)) { scene_.validate(); }

  std::string name() const override { return "synthetic"; }

  std::vector<Detection> detect(const DetectionRequest& req) const override {
    req.validate();
    require(req.image.width == scene_.camera.intrinsics.width &&
                req.image.height == scene_.camera.intrinsics.height,
            "request image size differs from the synthetic camera");
    return finalize_detections(synthetic_render(scene_), req);
  }

  const SyntheticScene& scene() const { return scene_; }

 private:
  SyntheticScene scene_;
};

inline Json intrinsics_to_json(const CameraIntrinsics& c) {
  return {{"focal_px", c.focal_px}, {"cx", c.cx}, {"cy", c.cy}, {"width", c.width},
          {"height", c.height}};
}

inline CameraIntrinsics intrinsics_from_json(const JsonReader& r) {
  CameraIntrinsics c;
  c.focal_px = r.at("focal_px").number();
  c.cx = r.at("cx").number();
  c.cy = r.at("cy").number();
  c.width = static_cast<int>(r.at("width").integer());
  c.height = static_cast<int>(r.at("height").integer());
  try {
    c.validate();
  } catch (const Error& e) {
    r.fail(e.what());
  }
  return c;
}

inline Json extrinsics_to_json(const CameraExtrinsics& e) {
  return {{"x", e.translation.x()}, {"y", e.translation.y()}, {"z", e.translation.z()},
          {"yaw_offset", e.yaw_offset}};
}

inline CameraExtrinsics extrinsics_from_json(const JsonReader& r) {
  CameraExtrinsics e;
  e.translation = {r.at("x").number(), r.at("y").number(), r.at("z").number()};
  e.yaw_offset = r.has("yaw_offset") ? r.at("yaw_offset").number() : 0.0;
  return e;
}

inline SyntheticScene SyntheticScene::from_json(const Json& doc) {
  JsonReader root(doc);
  root.expect_object();
  SyntheticScene s;
  const auto camera = root.at("camera");
  s.camera.intrinsics = intrinsics_from_json(camera.at("intrinsics"));
  if (camera.has("extrinsics")) s.camera.extrinsics = extrinsics_from_json(camera.at("extrinsics"));
  if (camera.has("pose")) s.camera.pose = pose_from_json(camera.at("pose"));
  if (root.has("background_depth_m")) s.background_depth_m = root.at("background_depth_m").number();
  const auto objects = root.at("objects");
  for (size_t i = 0; i < objects.array().size(); ++i) {
    const auto o = objects.at(i);
    SceneObject so;
    so.label = o.at("label").string();
    so.position = {o.at("x").number(), o.at("y").number(), o.at("z").number()};
    so.dimensions = {o.at("h").number(), o.at("w").number(), o.at("d").number()};
    if (!so.dimensions.valid()) o.fail("dimensions must be positive");
    s.objects.push_back(std::move(so));
  }
  return s;
}

inline Json SyntheticScene::to_json() const {
  Json objs = Json::array();
  for (const auto& o : objects)
    objs.push_back({{"label", o.label}, {"x", o.position.x()}, {"y", o.position.y()},
                    {"z", o.position.z()}, {"h", o.dimensions.h}, {"w", o.dimensions.w},
                    {"d", o.dimensions.d}});
  return {{"camera",
           {{"intrinsics", intrinsics_to_json(camera.intrinsics)},
            {"extrinsics", extrinsics_to_json(camera.extrinsics)},
            {"pose", pose_to_json(camera.pose)}}},
          {"background_depth_m", background_depth_m},
          {"objects", std::move(objs)}};
}

}  // namespace agmap
