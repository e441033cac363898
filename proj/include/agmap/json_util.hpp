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

#include <cmath>
#include <nlohmann/json.hpp>
#include <string>

#include "agmap/error.hpp"

namespace agmap {

using Json = nlohmann::json;

namespace json_detail {

inline std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

}  // namespace json_detail

/// Schema-checked field access. Every failure names the full field path.
class JsonReader {
 public:
  JsonReader(const Json& doc, std::string path = {}) : doc_(doc), path_(std::move(path)) {}

  const Json& doc() const { return doc_; }
  const std::string& path() const { return path_; }

  bool has(const std::string& key) const { return doc_.is_object() && doc_.contains(key); }

  JsonReader at(const std::string& key) const {
    expect_object();
    if (!doc_.contains(key))
      throw Error(ErrorKind::kSchema, "missing required field", json_detail::join(path_, key));
    return {doc_.at(key), json_detail::join(path_, key)};
  }

  JsonReader at(size_t i) const {
    return {doc_.at(i), path_ + "[" + std::to_string(i) + "]"};
  }

  void expect_object() const {
    if (!doc_.is_object()) throw Error(ErrorKind::kSchema, "expected an object", path_);
  }

  const Json& array() const {
    if (!doc_.is_array()) throw Error(ErrorKind::kSchema, "expected an array", path_);
    return doc_;
  }

  double number() const {
    if (!doc_.is_number()) throw Error(ErrorKind::kSchema, "expected a number", path_);
    const double v = doc_.get<double>();
    if (!std::isfinite(v)) throw Error(ErrorKind::kSchema, "expected a finite number", path_);
    return v;
  }

  long long integer() const {
    if (!doc_.is_number_integer())
      throw Error(ErrorKind::kSchema, "expected an integer", path_);
    return doc_.get<long long>();
  }

  std::string string() const {
    if (!doc_.is_string()) throw Error(ErrorKind::kSchema, "expected a string", path_);
    return doc_.get<std::string>();
  }

  bool boolean() const {
    if (!doc_.is_boolean()) throw Error(ErrorKind::kSchema, "expected a boolean", path_);
    return doc_.get<bool>();
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::kSchema, message, path_);
  }

 private:
  const Json& doc_;
  std::string path_;
};

/// Parses text into a document, mapping syntax errors to schema errors.
inline Json parse_json(const std::string& text, const std::string& what = "document") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kSchema, std::string("malformed JSON: ") + e.what(), what);
  }
}

}  // namespace agmap
