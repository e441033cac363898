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
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "agmap/error.hpp"
#include "agmap/geometry.hpp"

namespace agmap {

enum class DepthScale { kRelative, kMetric };

/// Row-major per-pixel depth. Metric maps are in meters; relative maps only
/// preserve ratios between pixels.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, double fill = 0.0, DepthScale scale = DepthScale::kMetric)
      : width_(width), height_(height), scale_(scale) {
    require(width > 0 && height > 0, "depth map dimensions must be positive");
    require(std::isfinite(fill) && fill >= 0.0, "depth values must be finite and non-negative");
    values_.assign(static_cast<size_t>(width) * height, fill);
  }
  DepthMap(int width, int height, std::vector<double> values, DepthScale scale)
      : width_(width), height_(height), scale_(scale), values_(std::move(values)) {
    require(width > 0 && height > 0, "depth map dimensions must be positive");
    require(values_.size() == static_cast<size_t>(width) * height,
            "depth value count does not match dimensions");
    for (double v : values_)
      require(std::isfinite(v) && v >= 0.0, "depth values must be finite and non-negative");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  DepthScale scale_state() const { return scale_; }
  void set_scale_state(DepthScale s) { scale_ = s; }

  double at(int x, int y) const { return values_[index(x, y)]; }
  double& at(int x, int y) { return values_[index(x, y)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool operator==(const DepthMap&) const = default;

 private:
  size_t index(int x, int y) const { return static_cast<size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  DepthScale scale_ = DepthScale::kMetric;
  std::vector<double> values_;
};

/// Binary pixel mask; non-zero means included.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height) : width_(width), height_(height) {
    require(width > 0 && height > 0, "mask dimensions must be positive");
    bits_.assign(static_cast<size_t>(width) * height, 0);
  }

  /// Pixels whose centers fall inside the box, clipped to the image.
  static Mask from_box(const BoundingBox& box, int width, int height) {
    Mask m(width, height);
    const int x0 = std::max(0, static_cast<int>(std::ceil(box.x_min - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(box.y_min - 0.5)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(box.x_max - 0.5)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(box.y_max - 0.5)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (x + 0.5 >= box.x_min && x + 0.5 < box.x_max && y + 0.5 >= box.y_min &&
            y + 0.5 < box.y_max)
          m.set(x, y);
    return m;
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool test(int x, int y) const { return bits_[static_cast<size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool on = true) {
    bits_[static_cast<size_t>(y) * width_ + x] = on ? 1 : 0;
  }
  size_t popcount() const {
    return static_cast<size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }
  std::span<const std::uint8_t> bits() const { return bits_; }

  bool operator==(const Mask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class DistanceMethod { kFused, kDepthOnly, kGeometricOnly };

inline std::string_view to_string(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::kFused: return "fused";
    case DistanceMethod::kDepthOnly: return "depth_only";
    case DistanceMethod::kGeometricOnly: return "geometric_only";
  }
  return "fused";
}

inline std::optional<DistanceMethod> distance_method_from_string(std::string_view s) {
  if (s == "fused") return DistanceMethod::kFused;
  if (s == "depth_only") return DistanceMethod::kDepthOnly;
  if (s == "geometric_only") return DistanceMethod::kGeometricOnly;
  return std::nullopt;
}

struct DistanceEstimate {
  std::optional<double> geometric_m;
  std::optional<double> depth_m;
  double fused_m = 0.0;
  DistanceMethod method = DistanceMethod::kFused;
};

/// Fusion weights for the pinhole and depth-network estimates.
inline constexpr double kGeometricWeight = 0.8;
inline constexpr double kDepthWeight = 0.2;

/// Median of the depth values under the mask. Even counts average the two
/// middle order statistics.
inline double median_masked_depth(const DepthMap& map, const Mask& mask) {
  require(map.width() == mask.width() && map.height() == mask.height(),
          "mask and depth map dimensions differ");
  std::vector<double> picked;
  const auto bits = mask.bits();
  const auto values = map.values();
  for (size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) picked.push_back(values[i]);
  if (picked.empty()) fail(ErrorKind::kEmptyRegion, "mask selects no pixels");

  const size_t mid = picked.size() / 2;
  std::nth_element(picked.begin(), picked.begin() + mid, picked.end());
  const double upper = picked[mid];
  if (picked.size() % 2 == 1) return upper;
  const double lower = *std::max_element(picked.begin(), picked.begin() + mid);
  return lower + 0.5 * (upper - lower);
}

struct DepthReference {
  Mask mask;
  double known_distance_m = 0.0;
};

/// Global scale converting a relative map to meters: the median over
/// references of known_distance / masked median.
inline double depth_scale_factor(const DepthMap& map, std::span<const DepthReference> refs) {
  if (refs.empty()) fail(ErrorKind::kMissingReference, "no reference objects for depth scaling");
  std::vector<double> scales;
  scales.reserve(refs.size());
  for (const auto& ref : refs) {
    require(std::isfinite(ref.known_distance_m) && ref.known_distance_m > 0.0,
            "reference distance must be positive");
    const double median = median_masked_depth(map, ref.mask);
    if (!(median > 0.0))
      fail(ErrorKind::kDegenerateReference, "reference region has zero median depth");
    scales.push_back(ref.known_distance_m / median);
  }
  const size_t mid = scales.size() / 2;
  std::nth_element(scales.begin(), scales.begin() + mid, scales.end());
  const double upper = scales[mid];
  if (scales.size() % 2 == 1) return upper;
  const double lower = *std::max_element(scales.begin(), scales.begin() + mid);
  return lower + 0.5 * (upper - lower);
}

inline DepthMap scale_depth_map(const DepthMap& map, std::span<const DepthReference> refs) {
  const double s = depth_scale_factor(map, refs);
  DepthMap out = map;
  for (double& v : out.values()) v *= s;
  out.set_scale_state(DepthScale::kMetric);
  return out;
}

/// Convex combination of the pinhole and depth-network estimates; depth only
/// when the object's size is unknown.
inline DistanceEstimate fuse_distance(std::optional<double> geometric_m, double depth_m) {
  require(std::isfinite(depth_m) && depth_m > 0.0, "depth estimate must be positive");
  DistanceEstimate est;
  est.depth_m = depth_m;
  if (!geometric_m) {
    est.fused_m = depth_m;
    est.method = DistanceMethod::kDepthOnly;
    return est;
  }
  const double g = *geometric_m;
  require(std::isfinite(g) && g > 0.0, "geometric estimate must be positive");
  est.geometric_m = g;
  est.fused_m = std::clamp(g + kDepthWeight * (depth_m - g), std::min(g, depth_m),
                           std::max(g, depth_m));
  est.method = DistanceMethod::kFused;
  return est;
}

}  // namespace agmap
