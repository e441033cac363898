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

#include <string>
#include <string_view>

#include "agmap/depth.hpp"
#include "agmap/detection.hpp"

namespace agmap::io {

/// Any format the image codecs understand (PNG, JPEG, PPM, ...).
RgbImage load_rgb(const std::string& path);

/// Non-zero pixels are part of the mask.
Mask load_mask(const std::string& path);
void save_mask(const std::string& path, const Mask& mask);

/// Float images (PFM, TIFF, EXR) are read as-is; 16-bit PNGs are multiplied
/// by `integer_scale` (millimeters to meters by default).
DepthMap load_depth(const std::string& path, DepthScale scale, double integer_scale = 0.001);
void save_depth(const std::string& path, const DepthMap& depth);

std::string encode_png(const RgbImage& image);
std::string base64_encode(std::string_view bytes);

}  // namespace agmap::io
