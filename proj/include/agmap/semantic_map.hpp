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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "agmap/catalog.hpp"
#include "agmap/depth.hpp"
#include "agmap/geometry.hpp"
#include "agmap/json_util.hpp"

namespace agmap {

enum class MapFrame { kRobotLocal, kWorld };

inline std::string_view to_string(MapFrame f) {
  return f == MapFrame::kWorld ? "world" : "robot_local";
}

struct SemanticObject {
  std::uint64_t id = 0;
  std::string label;
  Vec3 position = Vec3::Zero();
  Dimensions dimensions = kDefaultDimensions;
  double confidence = 1.0;
  DistanceMethod method = DistanceMethod::kFused;
  /// Capture time, seconds.
  double observed_at = 0.0;

  bool operator==(const SemanticObject& o) const {
    return id == o.id && label == o.label && position == o.position &&
           dimensions == o.dimensions && confidence == o.confidence && method == o.method &&
           observed_at == o.observed_at;
  }
};

inline constexpr double kDefaultMergeRadius = 0.5;

class SemanticMap {
 public:
  SemanticMap() = default;
  explicit SemanticMap(MapFrame frame, Pose capture_pose = {})
      : frame_(frame), robot_pose_(capture_pose) {}

  MapFrame frame() const { return frame_; }
  const Pose& robot_pose() const { return robot_pose_; }
  void set_robot_pose(const Pose& p) { robot_pose_ = p; }
  const std::vector<SemanticObject>& objects() const { return objects_; }
  size_t size() const { return objects_.size(); }
  bool empty() const { return objects_.empty(); }

  const SemanticObject* find(std::uint64_t id) const {
    auto it = std::find_if(objects_.begin(), objects_.end(),
                           [id](const SemanticObject& o) { return o.id == id; });
    return it == objects_.end() ? nullptr : &*it;
  }

  /// Inserts with a fresh id, ignoring obj.id.
  std::uint64_t insert(SemanticObject obj) {
    obj.id = next_id_++;
    objects_.push_back(std::move(obj));
    return objects_.back().id;
  }

  /// Inserts keeping obj.id; rejects duplicates.
  void insert_with_id(SemanticObject obj) {
    require(find(obj.id) == nullptr, "duplicate object id " + std::to_string(obj.id));
    next_id_ = std::max(next_id_, obj.id + 1);
    objects_.push_back(std::move(obj));
  }

  /// Folds a new observation into the map. A same-label object within
  /// `merge_radius` absorbs it (confidence-weighted position, max confidence);
  /// otherwise the observation becomes a new object.
  std::uint64_t merge_observation(const SemanticObject& obj, MapFrame obj_frame,
                                  double merge_radius = kDefaultMergeRadius) {
    require(obj_frame == frame_, "observation frame differs from the map frame");
    require(obj.position.allFinite(), "object position must be finite");
    require(obj.dimensions.valid(), "object dimensions must be positive");
    const std::string key = normalize_label(obj.label);
    SemanticObject* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (auto& existing : objects_) {
      if (normalize_label(existing.label) != key) continue;
      const double dist = (existing.position - obj.position).norm();
      if (dist <= merge_radius && dist < best_dist) {
        best = &existing;
        best_dist = dist;
      }
    }
    if (best == nullptr) return insert(obj);

    const double wsum = best->confidence + obj.confidence;
    if (wsum > 0.0)
      best->position = (best->confidence * best->position + obj.confidence * obj.position) / wsum;
    else
      best->position = 0.5 * (best->position + obj.position);
    best->confidence = std::max(best->confidence, obj.confidence);
    best->observed_at = std::max(best->observed_at, obj.observed_at);
    return best->id;
  }

  /// Re-expresses robot-local coordinates in the world frame. No-op for maps
  /// already in the world frame.
  SemanticMap to_world_frame(const Pose& robot) const {
    if (frame_ == MapFrame::kWorld) return *this;
    SemanticMap out = *this;
    out.frame_ = MapFrame::kWorld;
    out.robot_pose_ = robot;
    for (auto& o : out.objects_) o.position = robot_to_world(o.position, robot);
    return out;
  }

  bool operator==(const SemanticMap& o) const {
    return frame_ == o.frame_ && robot_pose_ == o.robot_pose_ && objects_ == o.objects_;
  }

  Json to_json() const;
  static SemanticMap from_json(const Json& doc);

 private:
  MapFrame frame_ = MapFrame::kWorld;
  Pose robot_pose_;
  std::vector<SemanticObject> objects_;
  std::uint64_t next_id_ = 1;
};

inline SemanticMap merge_observation(SemanticMap map, const SemanticObject& obj,
                                     MapFrame obj_frame, double merge_radius = kDefaultMergeRadius) {
  map.merge_observation(obj, obj_frame, merge_radius);
  return map;
}

inline SemanticMap to_world_frame(const SemanticMap& map, const Pose& robot) {
  return map.to_world_frame(robot);
}

inline Json pose_to_json(const Pose& p) {
  return {{"x", p.position.x()}, {"y", p.position.y()}, {"z", p.position.z()}, {"yaw", p.yaw}};
}

inline Pose pose_from_json(const JsonReader& r) {
  r.expect_object();
  return Pose(r.at("x").number(), r.at("y").number(), r.at("z").number(), r.at("yaw").number());
}

inline Json SemanticMap::to_json() const {
  Json objects = Json::array();
  for (const auto& o : objects_) {
    objects.push_back({{"id", o.id},
                       {"label", o.label},
                       {"x", o.position.x()},
                       {"y", o.position.y()},
                       {"z", o.position.z()},
                       {"h", o.dimensions.h},
                       {"w", o.dimensions.w},
                       {"d", o.dimensions.d},
                       {"confidence", o.confidence},
                       {"method", to_string(o.method)},
                       {"observed_at", o.observed_at}});
  }
  return {{"frame", to_string(frame_)}, {"robot_pose", pose_to_json(robot_pose_)},
          {"objects", std::move(objects)}};
}

inline SemanticMap SemanticMap::from_json(const Json& doc) {
  JsonReader root(doc);
  root.expect_object();
  const auto frame_field = root.at("frame");
  const std::string frame = frame_field.string();
  SemanticMap map;
  if (frame == "world")
    map.frame_ = MapFrame::kWorld;
  else if (frame == "robot_local")
    map.frame_ = MapFrame::kRobotLocal;
  else
    frame_field.fail("unknown frame tag '" + frame + "'");
  if (root.has("robot_pose")) map.robot_pose_ = pose_from_json(root.at("robot_pose"));

  const auto objects = root.at("objects");
  const Json& arr = objects.array();
  for (size_t i = 0; i < arr.size(); ++i) {
    const auto item = objects.at(i);
    item.expect_object();
    // "position" is the logical name for the x/y/z triple.
    if (!item.has("x") || !item.has("y") || !item.has("z"))
      throw Error(ErrorKind::kSchema, "missing required field", item.path() + ".position");
    SemanticObject o;
    const auto id = item.at("id");
    if (!id.doc().is_number_unsigned()) id.fail("expected a non-negative integer");
    o.id = id.doc().get<std::uint64_t>();
    o.label = item.at("label").string();
    o.position = {item.at("x").number(), item.at("y").number(), item.at("z").number()};
    o.dimensions = {item.at("h").number(), item.at("w").number(), item.at("d").number()};
    if (!o.dimensions.valid()) item.fail("dimensions must be positive");
    const auto conf = item.at("confidence");
    o.confidence = conf.number();
    if (o.confidence < 0.0 || o.confidence > 1.0) conf.fail("confidence outside [0, 1]");
    const auto method_field = item.at("method");
    auto method = distance_method_from_string(method_field.string());
    if (!method) method_field.fail("unknown method");
    o.method = *method;
    if (item.has("observed_at")) o.observed_at = item.at("observed_at").number();
    if (map.find(o.id) != nullptr) id.fail("duplicate object id");
    map.insert_with_id(std::move(o));
  }
  return map;
}

inline Json export_json(const SemanticMap& map) { return map.to_json(); }
inline SemanticMap import_json(const Json& doc) { return SemanticMap::from_json(doc); }

}  // namespace agmap
