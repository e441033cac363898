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

#include "agmap/io/remote_backend.hpp"

#include <httplib.h>

#include <cstdlib>
#include <regex>
#include <semaphore>
#include <thread>

#include "agmap/io/image_io.hpp"

namespace agmap::io {

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : fallback;
}

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re))
    throw Error(ErrorKind::kBackend, "detector endpoint must be an http(s) URL: '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

RemoteConfig RemoteConfig::from_env() {
  RemoteConfig c;
  c.endpoint = env_or("DETECTOR_ENDPOINT", "");
  c.api_key = env_or("DETECTOR_API_KEY", "");
  const std::string timeout = env_or("DETECTOR_TIMEOUT_S", "");
  if (!timeout.empty()) c.timeout_s = std::stod(timeout);
  return c;
}

struct RemoteBackend::Impl {
  RemoteConfig config;
  ParsedUrl url;
  mutable std::counting_semaphore<1024> in_flight;

  explicit Impl(RemoteConfig c)
      : config(std::move(c)), url(parse_url(config.endpoint)), in_flight(config.max_in_flight) {}
};

RemoteBackend::RemoteBackend(RemoteConfig config) {
  if (config.endpoint.empty())
    throw Error(ErrorKind::kBackend, "remote detector endpoint is not configured");
  require(config.max_in_flight >= 1 && config.max_in_flight <= 1024,
          "max_in_flight must be in [1, 1024]");
  require(config.timeout_s > 0.0, "timeout must be positive");
  impl_ = std::make_unique<Impl>(std::move(config));
}

RemoteBackend::~RemoteBackend() = default;

Json RemoteBackend::build_request(const DetectionRequest& req) {
  return {{"image",
           {{"format", "png"},
            {"width", req.image.width},
            {"height", req.image.height},
            {"data", base64_encode(encode_png(req.image))}}},
          {"labels", req.prompt_labels}};
}

std::vector<Detection> RemoteBackend::parse_response(const std::string& body, int width,
                                                     int height) {
  Json doc;
  try {
    doc = parse_json(body, "response");
    JsonReader root(doc);
    const auto dets = root.at("detections");
    std::vector<Detection> out;
    for (size_t i = 0; i < dets.array().size(); ++i) {
      const auto d = dets.at(i);
      const auto b = d.at("bbox");
      if (b.array().size() != 4) b.fail("expected [x0, y0, x1, y1]");
      Detection det;
      det.label = d.at("label").string();
      det.bbox = {b.at(0).number() * width, b.at(1).number() * height, b.at(2).number() * width,
                  b.at(3).number() * height};
      if (!(det.bbox.x_min < det.bbox.x_max && det.bbox.y_min < det.bbox.y_max))
        b.fail("degenerate bounding box");
      det.confidence = d.at("score").number();
      if (det.confidence < 0.0 || det.confidence > 1.0) d.at("score").fail("outside [0, 1]");
      out.push_back(std::move(det));
    }
    return out;
  } catch (const Error& e) {
    throw Error(ErrorKind::kBackend, std::string("malformed detector response: ") + e.what());
  }
}

std::vector<Detection> RemoteBackend::detect(const DetectionRequest& req) const {
  req.validate();
  const std::string body = build_request(req).dump();
  const auto& cfg = impl_->config;

  impl_->in_flight.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{impl_->in_flight};

  httplib::Client client(impl_->url.origin);
  const auto secs = static_cast<time_t>(cfg.timeout_s);
  const auto usecs = static_cast<time_t>((cfg.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

  std::string last_error;
  for (size_t attempt = 0; attempt <= cfg.backoff.size(); ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg.backoff[attempt - 1]);
    auto res = client.Post(impl_->url.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300)
      throw Error(ErrorKind::kBackend, "detector returned HTTP status " + std::to_string(res->status));
    return finalize_detections(parse_response(res->body, req.image.width, req.image.height), req);
  }
  throw Error(ErrorKind::kBackend, "detector request failed after " +
                                       std::to_string(cfg.backoff.size() + 1) +
                                       " attempts: " + last_error);
}

}  // namespace agmap::io
