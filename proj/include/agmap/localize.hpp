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

#include <optional>
#include <vector>

#include "agmap/catalog.hpp"
#include "agmap/depth.hpp"
#include "agmap/detection.hpp"
#include "agmap/geometry.hpp"
#include "agmap/semantic_map.hpp"

namespace agmap {

struct LocalizedObject {
  SemanticObject object;
  DistanceEstimate distance;
};

/// Turns one detection into a world-frame object. The pinhole estimate is
/// used when the class size is known; the masked-median depth when a metric
/// map is given; both are fused when available. The object is placed on the
/// ray through the bounding-box center.
inline LocalizedObject localize_object(const Detection& det, const DepthMap* metric_depth,
                                       const CameraIntrinsics& cam,
                                       const std::optional<Dimensions>& catalog_entry,
                                       const Pose& robot, const CameraExtrinsics& ext,
                                       double observed_at = 0.0) {
  cam.validate();
  det.bbox.validate();
  require(det.bbox.intersects_image(cam.width, cam.height), "detection lies outside the image");

  std::optional<double> geometric;
  if (catalog_entry) geometric = distance_from_bbox(det.bbox, cam, catalog_entry->h);

  std::optional<double> depth;
  if (metric_depth != nullptr) {
    require(metric_depth->scale_state() == DepthScale::kMetric,
            "depth map must be metric; scale it with reference objects first");
    require(metric_depth->width() == cam.width && metric_depth->height() == cam.height,
            "depth map dimensions differ from the camera image");
    const Mask region = det.mask ? *det.mask : Mask::from_box(det.bbox, cam.width, cam.height);
    const double median = median_masked_depth(*metric_depth, region);
    if (median > 0.0) depth = median;
  }

  DistanceEstimate est;
  if (depth) {
    est = fuse_distance(geometric, *depth);
  } else if (geometric) {
    est.geometric_m = geometric;
    est.fused_m = *geometric;
    est.method = DistanceMethod::kGeometricOnly;
  } else {
    fail(ErrorKind::kInvalidInput, "no distance estimate for '" + det.label +
                                       "': unknown size and no depth available");
  }

  SemanticObject obj;
  obj.label = det.label;
  obj.position = camera_to_world(backproject(det.bbox.center(), est.fused_m, cam), robot, ext);
  obj.dimensions = catalog_entry.value_or(kDefaultDimensions);
  obj.confidence = det.confidence;
  obj.method = est.method;
  obj.observed_at = observed_at;
  return {std::move(obj), est};
}

struct CaptureInput {
  std::vector<Detection> detections;
  std::optional<DepthMap> depth;
  CameraIntrinsics camera;
  CameraExtrinsics extrinsics;
  Pose robot_pose;
  double observed_at = 0.0;
};

/// Converts a relative depth map to meters using every detection of known
/// size as a reference (its pinhole distance is the known distance).
inline DepthMap scale_with_detections(const DepthMap& relative, const std::vector<Detection>& dets,
                                      const CameraIntrinsics& cam,
                                      const DimensionCatalog& catalog) {
  std::vector<DepthReference> refs;
  for (const auto& d : dets) {
    auto dims = catalog.lookup(d.label);
    if (!dims) continue;
    refs.push_back({d.mask ? *d.mask : Mask::from_box(d.bbox, cam.width, cam.height),
                    distance_from_bbox(d.bbox, cam, dims->h)});
  }
  return scale_depth_map(relative, refs);
}

/// Localizes every detection of one capture. Objects come back in the world
/// frame, or in the robot frame when `frame` is kRobotLocal.
inline std::vector<LocalizedObject> localize_capture(const CaptureInput& in,
                                                     const DimensionCatalog& catalog,
                                                     MapFrame frame = MapFrame::kWorld) {
  std::optional<DepthMap> metric;
  if (in.depth) {
    metric = in.depth->scale_state() == DepthScale::kMetric
                 ? *in.depth
                 : scale_with_detections(*in.depth, in.detections, in.camera, catalog);
  }
  const Pose pose = frame == MapFrame::kWorld ? in.robot_pose : Pose{};
  std::vector<LocalizedObject> out;
  out.reserve(in.detections.size());
  for (const auto& det : in.detections)
    out.push_back(localize_object(det, metric ? &*metric : nullptr, in.camera,
                                  catalog.lookup(det.label), pose, in.extrinsics,
                                  in.observed_at));
  return out;
}

}  // namespace agmap
