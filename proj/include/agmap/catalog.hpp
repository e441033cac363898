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

#include <map>
#include <optional>
#include <string>

#include "agmap/detection.hpp"
#include "agmap/error.hpp"
#include "agmap/json_util.hpp"

namespace agmap {

/// Object extents in meters: h along world z, w along world x, d along world y.
struct Dimensions {
  double h = 0.5;
  double w = 0.5;
  double d = 0.5;

  bool valid() const { return h > 0.0 && w > 0.0 && d > 0.0; }
  bool operator==(const Dimensions&) const = default;
};

/// Extent assigned to classes with no catalog entry.
inline constexpr Dimensions kDefaultDimensions{0.5, 0.5, 0.5};

/// Known real-world sizes per class label, with synonyms. Lookups are
/// case-insensitive.
class DimensionCatalog {
 public:
  void add(const std::string& label, Dimensions dims) {
    require(dims.valid(), "catalog dimensions must be positive: " + label);
    entries_[normalize_label(label)] = dims;
  }

  void alias(const std::string& synonym, const std::string& target) {
    const std::string key = normalize_label(target);
    require(entries_.contains(key), "alias target is not in the catalog: " + target);
    aliases_[normalize_label(synonym)] = key;
  }

  std::optional<Dimensions> lookup(const std::string& label) const {
    const std::string key = normalize_label(label);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    if (auto it = aliases_.find(key); it != aliases_.end()) return entries_.at(it->second);
    return std::nullopt;
  }

  const std::map<std::string, Dimensions>& entries() const { return entries_; }
  const std::map<std::string, std::string>& aliases() const { return aliases_; }

  /// Classes from the indoor search-and-rescue scene. Sizes are editable
  /// defaults, not measurements.
  static DimensionCatalog indoor_defaults() {
    DimensionCatalog c;
    c.add("desk", {0.75, 0.7, 1.4});
    c.add("chair", {0.9, 0.5, 0.5});
    c.add("suitcase", {0.7, 0.25, 0.45});
    c.add("compressor", {0.6, 0.4, 0.6});
    c.add("cabinet", {1.0, 0.5, 0.9});
    c.add("box", {0.4, 0.4, 0.4});
    c.add("robotic dog", {0.4, 0.65, 0.3});
    c.alias("office chair", "chair");
    c.alias("office cabinet", "cabinet");
    c.alias("table", "desk");
    c.alias("robot dog", "robotic dog");
    c.alias("cardboard box", "box");
    return c;
  }

  Json to_json() const {
    Json entries = Json::object();
    for (const auto& [k, v] : entries_) entries[k] = {{"h", v.h}, {"w", v.w}, {"d", v.d}};
    Json aliases = Json::object();
    for (const auto& [k, v] : aliases_) aliases[k] = v;
    return {{"entries", entries}, {"aliases", aliases}};
  }

  static DimensionCatalog from_json(const Json& doc) {
    JsonReader root(doc);
    DimensionCatalog c;
    const auto entries = root.at("entries");
    entries.expect_object();
    for (const auto& [label, value] : entries.doc().items()) {
      JsonReader e(value, "entries." + label);
      Dimensions dims{e.at("h").number(), e.at("w").number(), e.at("d").number()};
      if (!dims.valid()) e.fail("dimensions must be positive");
      c.add(label, dims);
    }
    if (root.has("aliases")) {
      const auto aliases = root.at("aliases");
      aliases.expect_object();
      for (const auto& [syn, target] : aliases.doc().items()) {
        JsonReader t(target, "aliases." + syn);
        const std::string name = t.string();
        if (!c.entries_.contains(normalize_label(name))) t.fail("alias target is not in the catalog");
        c.alias(syn, name);
      }
    }
    return c;
  }

 private:
  std::map<std::string, Dimensions> entries_;
  std::map<std::string, std::string> aliases_;
};

inline std::optional<Dimensions> lookup_dimensions(const DimensionCatalog& catalog,
                                                   const std::string& label) {
  return catalog.lookup(label);
}

}  // namespace agmap
