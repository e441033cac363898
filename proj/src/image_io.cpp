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

#include "agmap/io/image_io.hpp"

#include <openssl/evp.h>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <vector>

namespace agmap::io {

namespace {

cv::Mat read_or_throw(const std::string& path, int flags) {
  cv::Mat m = cv::imread(path, flags);
  if (m.empty()) throw Error(ErrorKind::kNotFound, "cannot read image file '" + path + "'");
  return m;
}

}  // namespace

RgbImage load_rgb(const std::string& path) {
  cv::Mat bgr = read_or_throw(path, cv::IMREAD_COLOR);
  RgbImage img{bgr.cols, bgr.rows, {}};
  img.pixels.resize(static_cast<size_t>(bgr.cols) * bgr.rows * 3);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      auto* px = &img.pixels[(static_cast<size_t>(y) * bgr.cols + x) * 3];
      px[0] = row[x][2];
      px[1] = row[x][1];
      px[2] = row[x][0];
    }
  }
  return img;
}

Mask load_mask(const std::string& path) {
  cv::Mat gray = read_or_throw(path, cv::IMREAD_GRAYSCALE);
  Mask m(gray.cols, gray.rows);
  for (int y = 0; y < gray.rows; ++y)
    for (int x = 0; x < gray.cols; ++x)
      if (gray.at<std::uint8_t>(y, x) != 0) m.set(x, y);
  return m;
}

void save_mask(const std::string& path, const Mask& mask) {
  cv::Mat gray(mask.height(), mask.width(), CV_8UC1, cv::Scalar(0));
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.test(x, y)) gray.at<std::uint8_t>(y, x) = 255;
  if (!cv::imwrite(path, gray)) fail(ErrorKind::kInvalidInput, "cannot write mask '" + path + "'");
}

DepthMap load_depth(const std::string& path, DepthScale scale, double integer_scale) {
  cv::Mat raw = read_or_throw(path, cv::IMREAD_ANYDEPTH | cv::IMREAD_GRAYSCALE);
  cv::Mat values;
  if (raw.depth() == CV_32F || raw.depth() == CV_64F)
    raw.convertTo(values, CV_64F);
  else if (raw.depth() == CV_16U)
    raw.convertTo(values, CV_64F, integer_scale);
  else
    raw.convertTo(values, CV_64F);
  std::vector<double> data(static_cast<size_t>(values.rows) * values.cols);
  for (int y = 0; y < values.rows; ++y)
    for (int x = 0; x < values.cols; ++x) {
      const double v = values.at<double>(y, x);
      data[static_cast<size_t>(y) * values.cols + x] = std::isfinite(v) && v > 0.0 ? v : 0.0;
    }
  return DepthMap(values.cols, values.rows, std::move(data), scale);
}

void save_depth(const std::string& path, const DepthMap& depth) {
  cv::Mat m(depth.height(), depth.width(), CV_32FC1);
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x) m.at<float>(y, x) = static_cast<float>(depth.at(x, y));
  if (!cv::imwrite(path, m)) fail(ErrorKind::kInvalidInput, "cannot write depth '" + path + "'");
}

std::string encode_png(const RgbImage& image) {
  require(!image.empty(), "cannot encode an empty image");
  cv::Mat bgr(image.height, image.width, CV_8UC3);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      const auto* px = &image.pixels[(static_cast<size_t>(y) * image.width + x) * 3];
      bgr.at<cv::Vec3b>(y, x) = cv::Vec3b(px[2], px[1], px[0]);
    }
  std::vector<std::uint8_t> buf;
  if (!cv::imencode(".png", bgr, buf)) fail(ErrorKind::kInvalidInput, "PNG encoding failed");
  return {buf.begin(), buf.end()};
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<size_t>(n));
  return out;
}

}  // namespace agmap::io
