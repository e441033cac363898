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
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agmap/depth.hpp"
#include "agmap/error.hpp"
#include "agmap/geometry.hpp"

namespace agmap {

/// Interleaved 8-bit RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static RgbImage blank(int width, int height) {
    return {width, height, std::vector<std::uint8_t>(static_cast<size_t>(width) * height * 3, 0)};
  }
  bool empty() const { return width <= 0 || height <= 0 || pixels.empty(); }
};

struct Detection {
  std::string label;
  BoundingBox bbox;
  double confidence = 1.0;
  std::optional<Mask> mask;
};

struct DetectionRequest {
  RgbImage image;
  std::vector<std::string> prompt_labels;
  /// Identifies the capture for replay fixtures; usually the image file stem.
  std::string image_id;

  void validate() const {
    require(!image.empty(), "detection request has an empty image");
    require(!prompt_labels.empty(), "detection request has no prompt labels");
  }
};

inline std::string normalize_label(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Returns the prompt spelling matching `label` case-insensitively, if any.
inline std::optional<std::string> match_prompt(const std::string& label,
                                               const std::vector<std::string>& prompts) {
  const std::string key = normalize_label(label);
  for (const auto& p : prompts)
    if (normalize_label(p) == key) return p;
  return std::nullopt;
}

/// Common post-processing shared by all backends: drop labels that were not
/// asked for, clip boxes to the image, validate, and sort by descending
/// confidence (stable, so equal scores keep backend order).
inline std::vector<Detection> finalize_detections(std::vector<Detection> dets,
                                                  const DetectionRequest& req) {
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (auto& d : dets) {
    auto prompt = match_prompt(d.label, req.prompt_labels);
    if (!prompt) continue;
    d.label = *prompt;
    require(d.confidence >= 0.0 && d.confidence <= 1.0, "confidence outside [0, 1]");
    d.bbox.validate();
    if (!d.bbox.intersects_image(req.image.width, req.image.height)) continue;
    d.bbox.x_min = std::max(d.bbox.x_min, 0.0);
    d.bbox.y_min = std::max(d.bbox.y_min, 0.0);
    d.bbox.x_max = std::min(d.bbox.x_max, static_cast<double>(req.image.width));
    d.bbox.y_max = std::min(d.bbox.y_max, static_cast<double>(req.image.height));
    if (d.mask)
      require(d.mask->width() == req.image.width && d.mask->height() == req.image.height,
              "mask dimensions differ from the image");
    out.push_back(std::move(d));
  }
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    return a.confidence > b.confidence;
  });
  return out;
}

/// A detector: remote API, fixture replay, or synthetic projection.
class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;
  virtual std::string name() const = 0;
  virtual std::vector<Detection> detect(const DetectionRequest& req) const = 0;
};

}  // namespace agmap
