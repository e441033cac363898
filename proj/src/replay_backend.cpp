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

#include "agmap/io/replay_backend.hpp"

#include <fstream>
#include <sstream>

#include "agmap/io/image_io.hpp"

namespace agmap::io {

ReplayBackend::ReplayBackend(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_))
    throw Error(ErrorKind::kNotFound, "replay fixture directory '" + dir_.string() + "' not found");
}

Json ReplayBackend::load(const std::string& image_id) const {
  require(!image_id.empty(), "replay needs an image id");
  const auto file = dir_ / (image_id + ".json");
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::kNotFound, "no replay fixture for image '" + image_id + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), file.string());
}

std::vector<Detection> ReplayBackend::parse_detections(const Json& doc,
                                                       const std::filesystem::path& base) {
  JsonReader root(doc);
  const auto dets = root.at("detections");
  std::vector<Detection> out;
  for (size_t i = 0; i < dets.array().size(); ++i) {
    const auto d = dets.at(i);
    Detection det;
    det.label = d.at("label").string();
    const auto bbox = d.at("bbox");
    if (bbox.array().size() != 4) bbox.fail("expected [x_min, y_min, x_max, y_max]");
    det.bbox = {bbox.at(0).number(), bbox.at(1).number(), bbox.at(2).number(), bbox.at(3).number()};
    if (!(det.bbox.x_min < det.bbox.x_max && det.bbox.y_min < det.bbox.y_max))
      bbox.fail("degenerate bounding box");
    det.confidence = d.has("confidence") ? d.at("confidence").number() : 1.0;
    if (det.confidence < 0.0 || det.confidence > 1.0) d.at("confidence").fail("outside [0, 1]");
    if (d.has("mask_file")) det.mask = load_mask((base / d.at("mask_file").string()).string());
    out.push_back(std::move(det));
  }
  return out;
}

std::vector<Detection> ReplayBackend::detect(const DetectionRequest& req) const {
  req.validate();
  return finalize_detections(parse_detections(load(req.image_id), dir_), req);
}

std::optional<DepthMap> ReplayBackend::depth_for(const std::string& image_id) const {
  const Json doc = load(image_id);
  JsonReader root(doc);
  if (!root.has("depth_file")) return std::nullopt;
  DepthScale scale = DepthScale::kMetric;
  if (root.has("depth_scale")) {
    const auto f = root.at("depth_scale");
    const std::string s = f.string();
    if (s == "relative")
      scale = DepthScale::kRelative;
    else if (s != "metric")
      f.fail("expected 'metric' or 'relative'");
  }
  return load_depth((dir_ / root.at("depth_file").string()).string(), scale);
}

}  // namespace agmap::io
