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

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "agmap/catalog.hpp"
#include "agmap/detection.hpp"
#include "agmap/eval.hpp"
#include "agmap/grid.hpp"
#include "agmap/json_util.hpp"
#include "agmap/localize.hpp"
#include "agmap/mission.hpp"
#include "agmap/planner.hpp"
#include "agmap/semantic_map.hpp"
#include "agmap/synthetic.hpp"

namespace agmap {

/// Settings shared by the CLI and the service.
struct PipelineConfig {
  Workspace workspace;
  double cell_size = kDefaultCellSize;
  PlannerCosts costs;
  DimensionCatalog catalog = DimensionCatalog::indoor_defaults();
  CameraIntrinsics camera;
  CameraExtrinsics extrinsics;
  double merge_radius = kDefaultMergeRadius;
  RobotSim sim;
  double mode_switch_s = 1.0;
};

inline Json workspace_to_json(const Workspace& ws) {
  return {{"min", Json::array({ws.min.x(), ws.min.y(), ws.min.z()})},
          {"max", Json::array({ws.max.x(), ws.max.y(), ws.max.z()})}};
}

inline Workspace workspace_from_json(const JsonReader& r) {
  auto vec = [](const JsonReader& a) {
    if (a.array().size() != 3) a.fail("expected [x, y, z]");
    return Vec3(a.at(0).number(), a.at(1).number(), a.at(2).number());
  };
  Workspace ws{vec(r.at("min")), vec(r.at("max"))};
  if (!((ws.max - ws.min).array() > 0.0).all()) r.fail("empty workspace");
  return ws;
}

/// Parses "WxDxH" (meters, e.g. "5x8x3").
inline Workspace parse_workspace_size(const std::string& text) {
  double w = 0, d = 0, h = 0;
  char x1 = 0, x2 = 0;
  std::istringstream in(text);
  in >> w >> x1 >> d >> x2 >> h;
  require(in && !(in >> std::ws).good() && (x1 == 'x' || x1 == 'X') && (x2 == 'x' || x2 == 'X'),
          "workspace must look like WxDxH, got '" + text + "'");
  require(w > 0 && d > 0 && h > 0, "workspace extents must be positive");
  return Workspace::from_size(w, d, h);
}

/// A synthetic mission scenario: the scene plus the operator inputs needed to
/// replay a capture-plan-execute session.
struct Scenario {
  std::string name;
  SyntheticScene scene;
  Workspace workspace;
  double cell_size = kDefaultCellSize;
  std::vector<std::string> prompts;
  Pose start_pose;
  std::vector<Pose> captures;
  std::optional<DimensionCatalog> catalog;
  std::string target_label;

  static Scenario from_json(const Json& doc) {
    JsonReader root(doc);
    root.expect_object();
    Scenario s;
    if (root.has("name")) s.name = root.at("name").string();
    s.scene = SyntheticScene::from_json(root.at("scene").doc());
    if (root.has("workspace")) s.workspace = workspace_from_json(root.at("workspace"));
    if (root.has("cell_size")) s.cell_size = root.at("cell_size").number();
    if (root.has("prompts")) {
      const auto p = root.at("prompts");
      for (size_t i = 0; i < p.array().size(); ++i) s.prompts.push_back(p.at(i).string());
    }
    if (root.has("start_pose")) s.start_pose = pose_from_json(root.at("start_pose"));
    if (root.has("captures")) {
      const auto c = root.at("captures");
      for (size_t i = 0; i < c.array().size(); ++i) s.captures.push_back(pose_from_json(c.at(i)));
    }
    if (root.has("catalog")) s.catalog = DimensionCatalog::from_json(root.at("catalog").doc());
    if (root.has("target_label")) s.target_label = root.at("target_label").string();
    if (s.prompts.empty())
      for (const auto& o : s.scene.objects)
        if (!match_prompt(o.label, s.prompts)) s.prompts.push_back(o.label);
    if (s.captures.empty()) s.captures.push_back(s.start_pose);
    return s;
  }

  /// Scene as seen by a robot standing at `robot`.
  SyntheticScene scene_at(const Pose& robot) const {
    SyntheticScene out = scene;
    out.camera.pose = robot;
    return out;
  }

  PipelineConfig config(PipelineConfig base = {}) const {
    base.workspace = workspace;
    base.cell_size = cell_size;
    base.camera = scene.camera.intrinsics;
    base.extrinsics = scene.camera.extrinsics;
    if (catalog) base.catalog = *catalog;
    return base;
  }
};

struct CaptureReport {
  std::vector<LocalizedObject> localized;
  std::vector<std::uint64_t> object_ids;  // map id each observation merged into
  StageTiming timing;
};

/// One capture: detect, obtain depth, localize, merge into the map. `depth`
/// may return nothing (pinhole-only localization) or a relative map (scaled
/// with reference objects).
inline CaptureReport run_capture(SemanticMap& map, const DetectorBackend& detector,
                                 const DetectionRequest& request,
                                 const std::function<std::optional<DepthMap>()>& depth,
                                 const PipelineConfig& cfg, const Pose& robot,
                                 double observed_at = 0.0) {
  request.validate();
  CaptureInput in;
  in.camera = cfg.camera;
  in.extrinsics = cfg.extrinsics;
  in.robot_pose = robot;
  in.observed_at = observed_at;
  CaptureReport report;
  report.timing = time_pipeline({
      {"detect", [&] { in.detections = detector.detect(request); }},
      {"depth", [&] { if (depth) in.depth = depth(); }},
      {"fuse", [&] { report.localized = localize_capture(in, cfg.catalog, map.frame()); }},
      {"merge",
       [&] {
         for (const auto& lo : report.localized)
           report.object_ids.push_back(map.merge_observation(lo.object, map.frame(), cfg.merge_radius));
       }},
  });
  if (map.frame() == MapFrame::kRobotLocal) map.set_robot_pose(robot);
  return report;
}

/// Capture against a synthetic scenario from the given robot pose.
inline CaptureReport run_synthetic_capture(SemanticMap& map, const Scenario& scenario,
                                           const PipelineConfig& cfg, const Pose& robot,
                                           std::vector<std::string> prompts = {},
                                           double observed_at = 0.0) {
  const SyntheticScene view = scenario.scene_at(robot);
  SyntheticBackend backend(view);
  DetectionRequest req;
  req.image = RgbImage::blank(view.camera.intrinsics.width, view.camera.intrinsics.height);
  req.prompt_labels = prompts.empty() ? scenario.prompts : std::move(prompts);
  req.image_id = scenario.name;
  return run_capture(map, backend, req, [&] { return std::optional<DepthMap>(synthetic_depth(view)); },
                     cfg, robot, observed_at);
}

}  // namespace agmap
