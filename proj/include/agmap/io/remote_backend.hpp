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

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "agmap/detection.hpp"
#include "agmap/json_util.hpp"

namespace agmap::io {

struct RemoteConfig {
  /// Full URL, e.g. "https://api.example.com/v1/detect".
  std::string endpoint;
  std::string api_key;
  double timeout_s = 30.0;
  /// Waits before each retry; its size is the retry count.
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(500),
                                                 std::chrono::milliseconds(1000)};
  int max_in_flight = 2;

  /// Reads DETECTOR_ENDPOINT, DETECTOR_API_KEY and DETECTOR_TIMEOUT_S.
  static RemoteConfig from_env();
};

/// Client for an open-vocabulary detection service.
///
/// Request body:
///   {"image": {"format": "png", "width": W, "height": H, "data": "<base64>"},
///    "labels": ["chair", ...]}
/// Response body:
///   {"detections": [{"label": "...", "bbox": [x0, y0, x1, y1], "score": s}]}
/// with bbox coordinates normalized to [0, 1].
///
/// Transport failures and 5xx/429 responses are retried with backoff; other
/// non-success statuses and malformed bodies fail immediately.
class RemoteBackend : public DetectorBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  ~RemoteBackend() override;

  std::string name() const override { return "remote"; }
  std::vector<Detection> detect(const DetectionRequest& req) const override;

  static Json build_request(const DetectionRequest& req);
  static std::vector<Detection> parse_response(const std::string& body, int width, int height);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace agmap::io
