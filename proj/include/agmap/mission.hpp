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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agmap/error.hpp"
#include "agmap/geometry.hpp"
#include "agmap/grid.hpp"
#include "agmap/json_util.hpp"
#include "agmap/planner.hpp"

namespace agmap {

enum class SegmentKind { kGroundMove, kTakeoff, kFlight, kLand };

inline std::string_view to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::kGroundMove: return "GroundMove";
    case SegmentKind::kTakeoff: return "Takeoff";
    case SegmentKind::kFlight: return "Flight";
    case SegmentKind::kLand: return "Land";
  }
  return "GroundMove";
}

inline std::optional<SegmentKind> segment_kind_from_string(std::string_view s) {
  if (s == "GroundMove") return SegmentKind::kGroundMove;
  if (s == "Takeoff") return SegmentKind::kTakeoff;
  if (s == "Flight") return SegmentKind::kFlight;
  if (s == "Land") return SegmentKind::kLand;
  return std::nullopt;
}

enum class ControlMode { kNone, kGround, kAir };

inline std::string_view to_string(ControlMode m) {
  switch (m) {
    case ControlMode::kNone: return "none";
    case ControlMode::kGround: return "ground";
    case ControlMode::kAir: return "air";
  }
  return "none";
}

inline ControlMode mode_for(SegmentKind k) {
  return k == SegmentKind::kGroundMove ? ControlMode::kGround : ControlMode::kAir;
}

struct MissionSegment {
  SegmentKind kind = SegmentKind::kGroundMove;
  std::vector<CellIndex> cells;

  bool operator==(const MissionSegment&) const = default;
};

struct Mission {
  std::vector<MissionSegment> segments;

  size_t count(SegmentKind k) const {
    return static_cast<size_t>(std::count_if(segments.begin(), segments.end(),
                                             [k](const MissionSegment& s) { return s.kind == k; }));
  }

  /// Segment cells joined back into one path (junctions deduplicated).
  std::vector<CellIndex> flatten() const {
    std::vector<CellIndex> out;
    for (const auto& s : segments)
      for (const auto& c : s.cells)
        if (out.empty() || out.back() != c) out.push_back(c);
    return out;
  }

  bool operator==(const Mission&) const = default;
};

/// Splits a path into typed segments: walking runs on z = 0, a Takeoff at
/// each ground-to-air step, flight runs on z >= 1, and a Land at each
/// air-to-ground step.
inline Mission compile(const PlannedPath& path, const OccupancyGrid& grid) {
  validate_path(grid, path.cells);
  const auto& c = path.cells;
  if (c.front().z != 0)
    fail(ErrorKind::kInvalidStart, "path starts above ground at " + c.front().str());
  Mission m;
  size_t i = 0;
  while (i < c.size()) {
    const bool ground = c[i].z == 0;
    size_t j = i;
    while (j + 1 < c.size() && (c[j + 1].z == 0) == ground) ++j;
    m.segments.push_back({ground ? SegmentKind::kGroundMove : SegmentKind::kFlight,
                          {c.begin() + static_cast<std::ptrdiff_t>(i),
                           c.begin() + static_cast<std::ptrdiff_t>(j) + 1}});
    if (j + 1 < c.size())
      m.segments.push_back({ground ? SegmentKind::kTakeoff : SegmentKind::kLand, {c[j], c[j + 1]}});
    i = j + 1;
  }
  return m;
}

inline Json mission_to_json(const Mission& m) {
  Json segs = Json::array();
  for (const auto& s : m.segments) {
    Json cells = Json::array();
    for (const auto& c : s.cells) cells.push_back(cell_to_json(c));
    segs.push_back({{"kind", to_string(s.kind)}, {"cells", std::move(cells)}});
  }
  return {{"segments", std::move(segs)}};
}

inline Mission mission_from_json(const Json& doc) {
  JsonReader root(doc);
  Mission m;
  const auto segs = root.at("segments");
  for (size_t i = 0; i < segs.array().size(); ++i) {
    const auto s = segs.at(i);
    const auto kind = s.at("kind");
    auto k = segment_kind_from_string(kind.string());
    if (!k) kind.fail("unknown segment kind");
    MissionSegment seg{*k, {}};
    const auto cells = s.at("cells");
    for (size_t j = 0; j < cells.array().size(); ++j) seg.cells.push_back(cell_from_json(cells.at(j)));
    m.segments.push_back(std::move(seg));
  }
  return m;
}

// --- mission manager -------------------------------------------------------

enum class Phase { kIdle, kSwitchingMode, kExecutingSegment, kCompleted, kAborted };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kIdle: return "Idle";
    case Phase::kSwitchingMode: return "SwitchingMode";
    case Phase::kExecutingSegment: return "ExecutingSegment";
    case Phase::kCompleted: return "Completed";
    case Phase::kAborted: return "Aborted";
  }
  return "Idle";
}

inline bool is_terminal(Phase p) { return p == Phase::kCompleted || p == Phase::kAborted; }

struct ManagerState {
  Phase phase = Phase::kIdle;
  /// Segment being executed, or the one the pending mode switch is for.
  int segment_index = -1;
  ControlMode active_mode = ControlMode::kNone;
  ControlMode pending_mode = ControlMode::kNone;
  std::string abort_reason;

  bool operator==(const ManagerState&) const = default;
};

enum class ManagerEventKind { kStart, kSegmentDone, kModeReady, kFailure };

struct ManagerEvent {
  ManagerEventKind kind = ManagerEventKind::kStart;
  std::string reason;

  static ManagerEvent start() { return {ManagerEventKind::kStart, {}}; }
  static ManagerEvent segment_done() { return {ManagerEventKind::kSegmentDone, {}}; }
  static ManagerEvent mode_ready() { return {ManagerEventKind::kModeReady, {}}; }
  static ManagerEvent failure(std::string why) { return {ManagerEventKind::kFailure, std::move(why)}; }
};

enum class CommandKind { kNone, kArmGround, kArmAir, kExecuteSegment, kHalt };

inline std::string_view to_string(CommandKind k) {
  switch (k) {
    case CommandKind::kNone: return "none";
    case CommandKind::kArmGround: return "arm_ground";
    case CommandKind::kArmAir: return "arm_air";
    case CommandKind::kExecuteSegment: return "execute_segment";
    case CommandKind::kHalt: return "halt";
  }
  return "none";
}

struct ManagerCommand {
  CommandKind kind = CommandKind::kNone;
  int segment_index = -1;

  bool operator==(const ManagerCommand&) const = default;
};

struct ManagerStep {
  ManagerState state;
  ManagerCommand command;
};

/// Mission-manager transition function. Illegal events throw kProtocol and
/// leave the caller's state untouched.
inline ManagerStep step_manager(const Mission& mission, const ManagerState& state,
                                const ManagerEvent& event) {
  auto illegal = [&]() -> ManagerStep {
    fail(ErrorKind::kProtocol, "event not accepted in phase " + std::string(to_string(state.phase)));
  };
  auto arm = [](ControlMode m) {
    return ManagerCommand{m == ControlMode::kGround ? CommandKind::kArmGround : CommandKind::kArmAir, -1};
  };
  auto switch_to = [&](ManagerState s, int index) -> ManagerStep {
    const ControlMode m = mode_for(mission.segments[static_cast<size_t>(index)].kind);
    s.segment_index = index;
    if (s.active_mode == m) {
      s.phase = Phase::kExecutingSegment;
      return {s, {CommandKind::kExecuteSegment, index}};
    }
    s.phase = Phase::kSwitchingMode;
    s.pending_mode = m;
    s.active_mode = ControlMode::kNone;
    return {s, arm(m)};
  };

  ManagerState next = state;
  switch (event.kind) {
    case ManagerEventKind::kFailure:
      if (is_terminal(state.phase)) return illegal();
      next.phase = Phase::kAborted;
      next.abort_reason = event.reason;
      next.active_mode = ControlMode::kNone;
      next.pending_mode = ControlMode::kNone;
      return {next, {CommandKind::kHalt, -1}};

    case ManagerEventKind::kStart:
      if (state.phase != Phase::kIdle) return illegal();
      if (mission.segments.empty()) {
        next.phase = Phase::kCompleted;
        return {next, {}};
      }
      next.active_mode = ControlMode::kNone;
      return switch_to(next, 0);

    case ManagerEventKind::kModeReady:
      if (state.phase != Phase::kSwitchingMode) return illegal();
      next.phase = Phase::kExecutingSegment;
      next.active_mode = state.pending_mode;
      next.pending_mode = ControlMode::kNone;
      return {next, {CommandKind::kExecuteSegment, state.segment_index}};

    case ManagerEventKind::kSegmentDone: {
      if (state.phase != Phase::kExecutingSegment) return illegal();
      const int following = state.segment_index + 1;
      if (following >= static_cast<int>(mission.segments.size())) {
        next.phase = Phase::kCompleted;
        return {next, {}};
      }
      return switch_to(next, following);
    }
  }
  return illegal();
}

// --- kinematic simulator ---------------------------------------------------

struct RobotSim {
  Pose pose;
  double walk_speed = 0.2;
  double flight_speed = 0.5;
  double vertical_speed = 0.3;

  void validate() const {
    require(walk_speed > 0.0 && flight_speed > 0.0 && vertical_speed > 0.0,
            "simulator speeds must be positive");
  }

  double speed_for(SegmentKind k) const {
    switch (k) {
      case SegmentKind::kGroundMove: return walk_speed;
      case SegmentKind::kFlight: return flight_speed;
      case SegmentKind::kTakeoff:
      case SegmentKind::kLand: return vertical_speed;
    }
    return walk_speed;
  }
};

/// Waypoints for one segment. Takeoff climbs above its ground cell and the
/// following Flight covers any horizontal offset; Land first moves over its
/// ground cell, then descends.
class SegmentRun {
 public:
  SegmentRun(const RobotSim& sim, const MissionSegment& seg, const OccupancyGrid& grid)
      : speed_(sim.speed_for(seg.kind)) {
    require(!seg.cells.empty(), "segment has no cells");
    if (seg.kind == SegmentKind::kTakeoff || seg.kind == SegmentKind::kLand) {
      require(seg.cells.size() == 2, "transition segment must hold exactly two cells");
      const Vec3 from = grid.center(seg.cells[0]);
      const Vec3 to = grid.center(seg.cells[1]);
      if (seg.kind == SegmentKind::kTakeoff) {
        targets_.push_back(Vec3(from.x(), from.y(), to.z()));
      } else {
        targets_.push_back(Vec3(to.x(), to.y(), from.z()));
        targets_.push_back(to);
      }
    } else {
      for (const auto& c : seg.cells) targets_.push_back(grid.center(c));
    }
    Vec3 p = sim.pose.position;
    for (const auto& t : targets_) {
      total_ += (t - p).norm();
      p = t;
    }
  }

  double speed() const { return speed_; }
  double total_length() const { return total_; }
  double traveled() const { return traveled_; }
  bool done() const { return next_ >= targets_.size(); }
  double progress() const { return total_ <= 0.0 ? 1.0 : std::min(1.0, traveled_ / total_); }

  /// Advances along the waypoints by speed * dt. Returns true when the last
  /// waypoint has been reached.
  bool advance(RobotSim& sim, double dt) {
    double budget = speed_ * dt;
    while (next_ < targets_.size()) {
      const Vec3 delta = targets_[next_] - sim.pose.position;
      const double dist = delta.norm();
      const double horizontal = std::hypot(delta.x(), delta.y());
      if (horizontal > 1e-12) sim.pose.yaw = normalize_angle(std::atan2(delta.y(), delta.x()));
      if (dist <= budget) {
        sim.pose.position = targets_[next_];
        budget -= dist;
        traveled_ += dist;
        ++next_;
        continue;
      }
      sim.pose.position += delta * (budget / dist);
      traveled_ += budget;
      break;
    }
    if (done()) traveled_ = total_;
    return done();
  }

 private:
  std::vector<Vec3> targets_;
  size_t next_ = 0;
  double speed_ = 0.0;
  double total_ = 0.0;
  double traveled_ = 0.0;
};

struct TickResult {
  double progress = 0.0;
  bool segment_done = false;
};

inline TickResult tick(RobotSim& sim, SegmentRun& run, double dt) {
  require(dt > 0.0, "tick needs a positive dt");
  const bool done = run.advance(sim, dt);
  return {run.progress(), done};
}

// --- runner ----------------------------------------------------------------

struct TelemetryRecord {
  double t = 0.0;
  Pose pose;
  Phase phase = Phase::kIdle;
  int segment_index = -1;
  double progress = 0.0;
};

inline Json telemetry_to_json(const TelemetryRecord& r) {
  return {{"type", "telemetry"},
          {"t", r.t},
          {"x", r.pose.position.x()},
          {"y", r.pose.position.y()},
          {"z", r.pose.position.z()},
          {"yaw", r.pose.yaw},
          {"phase", to_string(r.phase)},
          {"segment_index", r.segment_index},
          {"progress", r.progress}};
}

struct StateEvent {
  double t = 0.0;
  ManagerState state;
  ManagerCommand command;
  std::string segment_kind;  // empty when no segment applies
};

inline Json state_event_to_json(const StateEvent& e) {
  Json j = {{"type", "event"},
            {"t", e.t},
            {"phase", to_string(e.state.phase)},
            {"segment_index", e.state.segment_index},
            {"active_mode", to_string(e.state.active_mode)},
            {"command", to_string(e.command.kind)}};
  if (!e.segment_kind.empty()) j["segment_kind"] = e.segment_kind;
  if (e.state.phase == Phase::kAborted) j["reason"] = e.state.abort_reason;
  return j;
}

/// Drives the manager and simulator on one clock. Mode switches take
/// `mode_switch_s` of simulated time before the mode_ready acknowledgment.
class MissionRunner {
 public:
  MissionRunner(Mission mission, OccupancyGrid grid, RobotSim sim, double mode_switch_s = 1.0)
      : mission_(std::move(mission)), grid_(std::move(grid)), sim_(std::move(sim)),
        mode_switch_s_(mode_switch_s) {
    sim_.validate();
    require(mode_switch_s >= 0.0, "mode switch time must be non-negative");
  }

  const Mission& mission() const { return mission_; }
  const ManagerState& state() const { return state_; }
  const RobotSim& sim() const { return sim_; }
  const OccupancyGrid& grid() const { return grid_; }
  double time() const { return t_; }
  bool finished() const { return is_terminal(state_.phase); }

  void start() { apply(ManagerEvent::start()); }
  void abort(const std::string& reason) { apply(ManagerEvent::failure(reason)); }

  /// Advances the clock by dt. Returns the telemetry record for this tick,
  /// or nothing once the mission is finished or not yet started.
  std::optional<TelemetryRecord> step(double dt) {
    require(dt > 0.0, "step needs a positive dt");
    if (finished() || state_.phase == Phase::kIdle) return std::nullopt;
    t_ += dt;
    if (state_.phase == Phase::kSwitchingMode) {
      switch_elapsed_ += dt;
      if (switch_elapsed_ + 1e-12 >= mode_switch_s_) apply(ManagerEvent::mode_ready());
    } else if (state_.phase == Phase::kExecutingSegment && run_) {
      const TickResult r = tick(sim_, *run_, dt);
      progress_ = r.progress;
      if (r.segment_done) apply(ManagerEvent::segment_done());
    }
    return TelemetryRecord{t_, sim_.pose, state_.phase, state_.segment_index, progress_};
  }

  /// Drains state-change events recorded since the last call.
  std::vector<StateEvent> take_events() { return std::exchange(events_, {}); }

 private:
  void apply(const ManagerEvent& ev) {
    ManagerStep s = step_manager(mission_, state_, ev);
    state_ = s.state;
    std::string kind;
    if (state_.segment_index >= 0 && state_.segment_index < static_cast<int>(mission_.segments.size()))
      kind = std::string(to_string(mission_.segments[static_cast<size_t>(state_.segment_index)].kind));
    events_.push_back({t_, state_, s.command, kind});
    switch (s.command.kind) {
      case CommandKind::kArmGround:
      case CommandKind::kArmAir:
        switch_elapsed_ = 0.0;
        run_.reset();
        progress_ = 0.0;
        if (mode_switch_s_ <= 0.0) apply(ManagerEvent::mode_ready());
        break;
      case CommandKind::kExecuteSegment: {
        run_.emplace(sim_, mission_.segments[static_cast<size_t>(s.command.segment_index)], grid_);
        progress_ = run_->progress();
        if (run_->done()) apply(ManagerEvent::segment_done());
        break;
      }
      case CommandKind::kNone:
      case CommandKind::kHalt:
        run_.reset();
        if (state_.phase == Phase::kCompleted) progress_ = 1.0;
        break;
    }
  }

  Mission mission_;
  OccupancyGrid grid_;
  RobotSim sim_;
  double mode_switch_s_;
  ManagerState state_;
  std::optional<SegmentRun> run_;
  double t_ = 0.0;
  double switch_elapsed_ = 0.0;
  double progress_ = 0.0;
  std::vector<StateEvent> events_;
};

/// Runs a mission to a terminal phase, collecting every tick.
inline std::vector<TelemetryRecord> simulate(MissionRunner& runner, double dt = 0.05,
                                             double max_time_s = 36000.0) {
  std::vector<TelemetryRecord> log;
  if (runner.state().phase == Phase::kIdle) runner.start();
  while (!runner.finished()) {
    require(runner.time() < max_time_s, "simulation exceeded the time limit");
    if (auto rec = runner.step(dt)) log.push_back(*rec);
  }
  return log;
}

}  // namespace agmap
