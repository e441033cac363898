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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agmap/depth.hpp"
#include "agmap/detection.hpp"
#include "agmap/json_util.hpp"

namespace agmap::io {

/// Serves recorded detections from a fixture directory holding one
/// `<image_id>.json` document per capture:
///
///   {"image_id": "...",
///    "detections": [{"label": "...", "bbox": [x_min, y_min, x_max, y_max],
///                    "confidence": 0.9, "mask_file": "optional.png"}],
///    "depth_file": "optional.pfm", "depth_scale": "metric" | "relative"}
///
/// Relative file names resolve against the fixture directory.
class ReplayBackend : public DetectorBackend {
 public:
  explicit ReplayBackend(std::filesystem::path dir);

  std::string name() const override { return "replay"; }
  std::vector<Detection> detect(const DetectionRequest& req) const override;

  /// Depth recorded alongside the detections, if the fixture has one.
  std::optional<DepthMap> depth_for(const std::string& image_id) const;

  /// Parses one fixture document; mask paths resolve against `base`.
  static std::vector<Detection> parse_detections(const Json& doc,
                                                 const std::filesystem::path& base);

 private:
  Json load(const std::string& image_id) const;

  std::filesystem::path dir_;
};

}  // namespace agmap::io
