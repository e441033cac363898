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
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agmap/error.hpp"
#include "agmap/geometry.hpp"
#include "agmap/json_util.hpp"
#include "agmap/semantic_map.hpp"

namespace agmap {

enum class CellState : std::uint8_t { kFree = 0, kDangerous = 1, kOccupied = 2 };
enum class LayerClass { kGround, kTransition, kCruise };

inline std::string_view to_string(CellState s) {
  switch (s) {
    case CellState::kFree: return "free";
    case CellState::kDangerous: return "dangerous";
    case CellState::kOccupied: return "occupied";
  }
  return "free";
}

inline std::string_view to_string(LayerClass l) {
  switch (l) {
    case LayerClass::kGround: return "ground";
    case LayerClass::kTransition: return "transition";
    case LayerClass::kCruise: return "cruise";
  }
  return "ground";
}

/// z = 0 is walking, z = 1 is the takeoff/landing layer, everything above is
/// cruise flight.
inline LayerClass layer_of(int z) {
  if (z <= 0) return LayerClass::kGround;
  if (z == 1) return LayerClass::kTransition;
  return LayerClass::kCruise;
}

struct CellIndex {
  int x = 0;
  int y = 0;
  int z = 0;

  auto operator<=>(const CellIndex&) const = default;
  std::string str() const {
    return "(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(z) + ")";
  }
};

/// True when a and b are distinct and differ by at most one step per axis.
inline bool adjacent26(const CellIndex& a, const CellIndex& b) {
  const int dx = std::abs(a.x - b.x);
  const int dy = std::abs(a.y - b.y);
  const int dz = std::abs(a.z - b.z);
  return dx <= 1 && dy <= 1 && dz <= 1 && (dx + dy + dz) > 0;
}

inline Json cell_to_json(const CellIndex& c) { return Json::array({c.x, c.y, c.z}); }

inline CellIndex cell_from_json(const JsonReader& r) {
  const Json& a = r.array();
  if (a.size() != 3) r.fail("expected [x, y, z]");
  return {static_cast<int>(r.at(0).integer()), static_cast<int>(r.at(1).integer()),
          static_cast<int>(r.at(2).integer())};
}

/// Axis-aligned world-frame planning volume.
struct Workspace {
  Vec3 min = Vec3(0.0, -2.5, 0.0);
  Vec3 max = Vec3(8.0, 2.5, 3.0);

  /// Default 5 m wide, 8 m deep, 3 m high volume in front of the start.
  static Workspace from_size(double width_y, double depth_x, double height_z) {
    return {Vec3(0.0, -0.5 * width_y, 0.0), Vec3(depth_x, 0.5 * width_y, height_z)};
  }
};

inline constexpr double kDefaultCellSize = 0.5;

class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(Vec3 origin, double cell_size, int nx, int ny, int nz)
      : origin_(std::move(origin)), cell_size_(cell_size), nx_(nx), ny_(ny), nz_(nz) {
    require(cell_size > 0.0 && std::isfinite(cell_size), "cell size must be positive");
    require(nx >= 1 && ny >= 1 && nz >= 2, "grid needs at least 1x1x2 cells");
    cells_.assign(static_cast<size_t>(nx) * ny * nz, CellState::kFree);
  }

  const Vec3& origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  size_t cell_count() const { return cells_.size(); }

  bool contains(const CellIndex& c) const {
    return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x < nx_ && c.y < ny_ && c.z < nz_;
  }
  size_t linear(const CellIndex& c) const {
    return static_cast<size_t>(c.x) + static_cast<size_t>(nx_) * (c.y + static_cast<size_t>(ny_) * c.z);
  }
  CellIndex unlinear(size_t i) const {
    const int x = static_cast<int>(i % nx_);
    const int y = static_cast<int>((i / nx_) % ny_);
    const int z = static_cast<int>(i / (static_cast<size_t>(nx_) * ny_));
    return {x, y, z};
  }

  CellState state(const CellIndex& c) const { return cells_[linear(c)]; }
  void set_state(const CellIndex& c, CellState s) { cells_[linear(c)] = s; }
  const std::vector<CellState>& states() const { return cells_; }

  Vec3 center(const CellIndex& c) const {
    return origin_ + cell_size_ * Vec3(c.x + 0.5, c.y + 0.5, c.z + 0.5);
  }

  std::optional<CellIndex> cell_of(const Vec3& p) const {
    const Vec3 rel = (p - origin_) / cell_size_;
    CellIndex c{static_cast<int>(std::floor(rel.x())), static_cast<int>(std::floor(rel.y())),
                static_cast<int>(std::floor(rel.z()))};
    if (!contains(c)) return std::nullopt;
    return c;
  }

  size_t count(CellState s) const {
    return static_cast<size_t>(std::count(cells_.begin(), cells_.end(), s));
  }

  /// Marks every Free 26-neighbor of an Occupied cell as Dangerous.
  void inflate_danger() {
    for (size_t i = 0; i < cells_.size(); ++i) {
      if (cells_[i] != CellState::kOccupied) continue;
      const CellIndex c = unlinear(i);
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const CellIndex n{c.x + dx, c.y + dy, c.z + dz};
            if (contains(n) && state(n) == CellState::kFree) set_state(n, CellState::kDangerous);
          }
    }
  }

  bool operator==(const OccupancyGrid&) const = default;

  Json to_json() const;
  static OccupancyGrid from_json(const Json& doc);

 private:
  Vec3 origin_ = Vec3::Zero();
  double cell_size_ = kDefaultCellSize;
  int nx_ = 0;
  int ny_ = 0;
  int nz_ = 0;
  std::vector<CellState> cells_;
};

namespace grid_detail {

inline int cell_count_along(double extent, double cell) {
  const double n = extent / cell;
  const double r = std::round(n);
  return static_cast<int>(std::abs(n - r) < 1e-9 ? r : std::ceil(n));
}

}  // namespace grid_detail

/// World-frame box occupied by an object: centered in x/y on its position,
/// resting no lower than the floor.
struct ObjectBox {
  Vec3 lo;
  Vec3 hi;
};

inline ObjectBox object_box(const SemanticObject& o) {
  const auto& d = o.dimensions;
  const double bottom = std::max(0.0, o.position.z() - 0.5 * d.h);
  return {Vec3(o.position.x() - 0.5 * d.w, o.position.y() - 0.5 * d.d, bottom),
          Vec3(o.position.x() + 0.5 * d.w, o.position.y() + 0.5 * d.d, bottom + d.h)};
}

/// Builds the Free/Dangerous/Occupied grid over the workspace. A cell is
/// Occupied when its interior overlaps an object box.
inline OccupancyGrid rasterize(const SemanticMap& map, const Workspace& ws,
                               double cell_size = kDefaultCellSize) {
  require(map.frame() == MapFrame::kWorld, "rasterize needs a world-frame map");
  require(cell_size > 0.0 && std::isfinite(cell_size), "cell size must be positive");
  const Vec3 extent = ws.max - ws.min;
  require(extent.x() > 0.0 && extent.y() > 0.0 && extent.z() > 0.0, "empty workspace");
  OccupancyGrid grid(ws.min, cell_size, grid_detail::cell_count_along(extent.x(), cell_size),
                     grid_detail::cell_count_along(extent.y(), cell_size),
                     grid_detail::cell_count_along(extent.z(), cell_size));

  const std::array<int, 3> dims{grid.nx(), grid.ny(), grid.nz()};
  for (const auto& obj : map.objects()) {
    const ObjectBox box = object_box(obj);
    std::array<int, 3> lo{};
    std::array<int, 3> hi{};
    bool empty = false;
    for (int a = 0; a < 3; ++a) {
      // Cells [i*s, (i+1)*s) overlap the open box interval (lo, hi).
      const double l = (box.lo[a] - ws.min[a]) / cell_size;
      const double h = (box.hi[a] - ws.min[a]) / cell_size;
      lo[a] = std::max(0, static_cast<int>(std::floor(l)));
      hi[a] = std::min(dims[a] - 1, static_cast<int>(std::ceil(h)) - 1);
      if (lo[a] > hi[a]) empty = true;
    }
    if (empty) continue;
    for (int z = lo[2]; z <= hi[2]; ++z)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int x = lo[0]; x <= hi[0]; ++x) grid.set_state({x, y, z}, CellState::kOccupied);
  }
  grid.inflate_danger();
  return grid;
}

inline Json OccupancyGrid::to_json() const {
  Json rle = Json::array();
  for (size_t i = 0; i < cells_.size();) {
    size_t j = i;
    while (j < cells_.size() && cells_[j] == cells_[i]) ++j;
    rle.push_back(Json::array({static_cast<int>(cells_[i]), j - i}));
    i = j;
  }
  Json layers = Json::array();
  for (int z = 0; z < nz_; ++z) layers.push_back(to_string(layer_of(z)));
  return {{"origin", Json::array({origin_.x(), origin_.y(), origin_.z()})},
          {"cell_size", cell_size_},
          {"dims", Json::array({nx_, ny_, nz_})},
          {"order", "x_fastest"},
          {"states", Json::array({"free", "dangerous", "occupied"})},
          {"rle", std::move(rle)},
          {"layers", std::move(layers)}};
}

inline OccupancyGrid OccupancyGrid::from_json(const Json& doc) {
  JsonReader root(doc);
  root.expect_object();
  const auto origin = root.at("origin");
  if (origin.array().size() != 3) origin.fail("expected [x, y, z]");
  const auto dims = root.at("dims");
  if (dims.array().size() != 3) dims.fail("expected [nx, ny, nz]");
  OccupancyGrid g(Vec3(origin.at(0).number(), origin.at(1).number(), origin.at(2).number()),
                  root.at("cell_size").number(), static_cast<int>(dims.at(0).integer()),
                  static_cast<int>(dims.at(1).integer()), static_cast<int>(dims.at(2).integer()));
  const auto rle = root.at("rle");
  size_t pos = 0;
  for (size_t i = 0; i < rle.array().size(); ++i) {
    const auto run = rle.at(i);
    if (run.array().size() != 2) run.fail("expected [state, count]");
    const long long s = run.at(0).integer();
    const long long n = run.at(1).integer();
    if (s < 0 || s > 2) run.at(0).fail("unknown cell state");
    if (n <= 0 || pos + static_cast<size_t>(n) > g.cells_.size()) run.at(1).fail("bad run length");
    std::fill_n(g.cells_.begin() + static_cast<std::ptrdiff_t>(pos), n, static_cast<CellState>(s));
    pos += static_cast<size_t>(n);
  }
  if (pos != g.cells_.size()) rle.fail("run lengths do not cover the grid");
  return g;
}

}  // namespace agmap
