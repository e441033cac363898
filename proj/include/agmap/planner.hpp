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
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

#include "agmap/error.hpp"
#include "agmap/grid.hpp"
#include "agmap/json_util.hpp"

namespace agmap {

/// Layer multipliers and the additive penalty for entering a Dangerous cell.
/// Ordering walk < cruise < takeoff/landing layer is enforced.
struct PlannerCosts {
  double ground = 1.0;
  double transition = 4.0;
  double cruise = 2.0;
  /// Penalty in units of cell size.
  double danger_cells = 10.0;

  void validate() const {
    require(ground > 0.0 && ground < cruise && cruise < transition,
            "layer multipliers must satisfy 0 < ground < cruise < transition");
    require(danger_cells >= 0.0, "danger penalty must be non-negative");
  }

  double multiplier(LayerClass l) const {
    switch (l) {
      case LayerClass::kGround: return ground;
      case LayerClass::kTransition: return transition;
      case LayerClass::kCruise: return cruise;
    }
    return ground;
  }
  double min_multiplier() const { return std::min({ground, transition, cruise}); }
};

/// Costs are accumulated as integer multiples of 2^-30 m so that sums are
/// exact and independent of summation order.
using CostUnits = std::int64_t;
inline constexpr double kCostQuantum = 1.0 / 1073741824.0;

inline CostUnits quantize_cost(double meters) {
  return static_cast<CostUnits>(std::llround(meters / kCostQuantum));
}
inline double cost_to_meters(CostUnits q) { return static_cast<double>(q) * kCostQuantum; }

/// Cost of stepping from `from` into the 26-neighbor `to`.
inline double edge_cost(const OccupancyGrid& grid, const CellIndex& from, const CellIndex& to,
                        const PlannerCosts& costs) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double dz = to.z - from.z;
  double c = std::sqrt(dx * dx + dy * dy + dz * dz) * grid.cell_size() *
             costs.multiplier(layer_of(to.z));
  if (grid.state(to) == CellState::kDangerous) c += costs.danger_cells * grid.cell_size();
  return c;
}

inline CostUnits edge_cost_units(const OccupancyGrid& grid, const CellIndex& from,
                                 const CellIndex& to, const PlannerCosts& costs) {
  return quantize_cost(edge_cost(grid, from, to, costs));
}

enum class PathStatus { kCandidate, kRegistered };

inline std::string_view to_string(PathStatus s) {
  return s == PathStatus::kRegistered ? "registered" : "candidate";
}

struct PlannedPath {
  std::vector<CellIndex> cells;
  double cost = 0.0;
  PathStatus status = PathStatus::kCandidate;

  bool operator==(const PlannedPath&) const = default;
};

/// Sum of edge costs along `cells`, in cost units.
inline CostUnits path_cost_units(const OccupancyGrid& grid, const std::vector<CellIndex>& cells,
                                 const PlannerCosts& costs) {
  CostUnits total = 0;
  for (size_t i = 1; i < cells.size(); ++i)
    total += edge_cost_units(grid, cells[i - 1], cells[i], costs);
  return total;
}

/// Throws kInvalidPath unless the path is non-empty, inside the grid,
/// 26-connected and free of Occupied cells.
inline void validate_path(const OccupancyGrid& grid, const std::vector<CellIndex>& cells) {
  require(!cells.empty(), "path is empty", ErrorKind::kInvalidPath);
  for (size_t i = 0; i < cells.size(); ++i) {
    require(grid.contains(cells[i]), "path leaves the grid at " + cells[i].str(),
            ErrorKind::kInvalidPath);
    require(grid.state(cells[i]) != CellState::kOccupied,
            "path crosses occupied cell " + cells[i].str(), ErrorKind::kInvalidPath);
    if (i > 0)
      require(adjacent26(cells[i - 1], cells[i]),
              "path cells " + cells[i - 1].str() + " and " + cells[i].str() + " are not adjacent",
              ErrorKind::kInvalidPath);
  }
}

/// Aerial-Ground A*: 26-connected search whose edge cost is Euclidean step
/// length times the target layer multiplier, plus a flat penalty for
/// entering a Dangerous cell. Open-set ties prefer lower z, then the
/// lexicographically smaller (x, y) index.
inline PlannedPath plan(const OccupancyGrid& grid, const CellIndex& start, const CellIndex& goal,
                        const PlannerCosts& costs = {}) {
  costs.validate();
  require(grid.contains(start), "start " + start.str() + " is outside the grid");
  require(grid.contains(goal), "goal " + goal.str() + " is outside the grid");
  require(grid.state(start) != CellState::kOccupied, "start not traversable");
  require(grid.state(goal) != CellState::kOccupied, "goal not traversable");
  if (start == goal) return {{start}, 0.0, PathStatus::kCandidate};

  // Shrunk slightly so the heuristic stays below the quantized edge sums.
  const double h_scale =
      grid.cell_size() * costs.min_multiplier() / kCostQuantum * (1.0 - 1e-6);
  auto heuristic = [&](const CellIndex& c) -> CostUnits {
    const double dx = c.x - goal.x;
    const double dy = c.y - goal.y;
    const double dz = c.z - goal.z;
    return static_cast<CostUnits>(std::floor(std::sqrt(dx * dx + dy * dy + dz * dz) * h_scale));
  };

  constexpr CostUnits kInf = std::numeric_limits<CostUnits>::max();
  const size_t n = grid.cell_count();
  std::vector<CostUnits> g(n, kInf);
  std::vector<std::int64_t> parent(n, -1);

  // (f, z, x, y, g)
  using Entry = std::tuple<CostUnits, int, int, int, CostUnits>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[grid.linear(start)] = 0;
  open.emplace(heuristic(start), start.z, start.x, start.y, 0);

  bool found = false;
  while (!open.empty()) {
    const auto [f, z, x, y, gc] = open.top();
    open.pop();
    const CellIndex cur{x, y, z};
    const size_t ci = grid.linear(cur);
    if (gc != g[ci]) continue;  // stale entry
    if (cur == goal) {
      found = true;
      break;
    }
    for (int dz = -1; dz <= 1; ++dz)
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const CellIndex nb{x + dx, y + dy, z + dz};
          if (!grid.contains(nb) || grid.state(nb) == CellState::kOccupied) continue;
          const size_t ni = grid.linear(nb);
          const CostUnits ng = gc + edge_cost_units(grid, cur, nb, costs);
          if (ng < g[ni]) {
            g[ni] = ng;
            parent[ni] = static_cast<std::int64_t>(ci);
            open.emplace(ng + heuristic(nb), nb.z, nb.x, nb.y, ng);
          }
        }
  }
  if (!found) fail(ErrorKind::kUnreachable, "goal " + goal.str() + " is unreachable");

  PlannedPath path;
  for (std::int64_t i = static_cast<std::int64_t>(grid.linear(goal)); i >= 0; i = parent[static_cast<size_t>(i)])
    path.cells.push_back(grid.unlinear(static_cast<size_t>(i)));
  std::reverse(path.cells.begin(), path.cells.end());
  path.cost = cost_to_meters(g[grid.linear(goal)]);
  return path;
}

/// Multi-stop path design: each registered segment moves the anchor to its
/// last cell, and the next plan starts there.
class PlanSession {
 public:
  PlanSession() = default;
  explicit PlanSession(CellIndex robot_start) : start_(robot_start) {}

  const CellIndex& robot_start() const { return start_; }
  const std::vector<PlannedPath>& registered() const { return registered_; }

  CellIndex anchor() const {
    return registered_.empty() ? start_ : registered_.back().cells.back();
  }

  PlannedPath plan_next(const OccupancyGrid& grid, const CellIndex& goal,
                        const PlannerCosts& costs = {}) const {
    return plan(grid, anchor(), goal, costs);
  }

  void register_path(const OccupancyGrid& grid, PlannedPath candidate) {
    require(!candidate.cells.empty() && candidate.cells.front() == anchor(),
            "candidate does not start at the session anchor " + anchor().str(),
            ErrorKind::kAnchor);
    validate_path(grid, candidate.cells);
    candidate.status = PathStatus::kRegistered;
    registered_.push_back(std::move(candidate));
  }

  void clear(CellIndex robot_start) {
    start_ = robot_start;
    registered_.clear();
  }

 private:
  CellIndex start_;
  std::vector<PlannedPath> registered_;
};

inline PlanSession register_path(PlanSession session, const OccupancyGrid& grid,
                                 PlannedPath candidate) {
  session.register_path(grid, std::move(candidate));
  return session;
}

/// Joins registered segments, dropping the duplicated junction cells.
inline PlannedPath concat_registered(const PlanSession& session) {
  const auto& segs = session.registered();
  if (segs.empty()) fail(ErrorKind::kEmptySession, "no registered paths");
  PlannedPath out;
  out.status = PathStatus::kRegistered;
  for (const auto& s : segs) {
    auto first = s.cells.begin();
    if (!out.cells.empty() && out.cells.back() == *first) ++first;
    out.cells.insert(out.cells.end(), first, s.cells.end());
    out.cost += s.cost;
  }
  return out;
}

inline Json path_to_json(const PlannedPath& p) {
  Json cells = Json::array();
  for (const auto& c : p.cells) cells.push_back(cell_to_json(c));
  return {{"cells", std::move(cells)}, {"cost", p.cost}, {"status", to_string(p.status)}};
}

inline PlannedPath path_from_json(const JsonReader& r) {
  r.expect_object();
  PlannedPath p;
  const auto cells = r.at("cells");
  for (size_t i = 0; i < cells.array().size(); ++i) p.cells.push_back(cell_from_json(cells.at(i)));
  p.cost = r.at("cost").number();
  const auto status = r.at("status");
  const std::string s = status.string();
  if (s == "candidate")
    p.status = PathStatus::kCandidate;
  else if (s == "registered")
    p.status = PathStatus::kRegistered;
  else
    status.fail("unknown path status '" + s + "'");
  return p;
}

}  // namespace agmap
