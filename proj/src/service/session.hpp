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

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "agmap/io/remote_backend.hpp"
#include "agmap/json_util.hpp"
#include "agmap/pipeline.hpp"
#include "service/telemetry_hub.hpp"

namespace agmap::service {

enum class BackendKind { kSynthetic, kReplay, kRemote };

struct SessionConfig {
  PipelineConfig pipeline;
  BackendKind backend = BackendKind::kSynthetic;
  /// Synthetic: the scenario. Replay: the fixture directory.
  std::optional<Scenario> scenario;
  std::filesystem::path replay_dir;
  io::RemoteConfig remote;
  Pose start_pose;
  /// Simulator step (simulated seconds) and wall-clock speed-up. A
  /// non-positive time_scale runs the simulator as fast as possible.
  double sim_dt = 0.05;
  double time_scale = 1.0;
};

/// Per-operator state: map, grid, plan session, mission and simulator.
/// Every public call is serialized on one mutex.
class Session {
 public:
  explicit Session(SessionConfig cfg);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  Json capture(const Json& body);
  Json map_document() const;
  Json import_map(const Json& body);
  Json grid_document() const;
  Json plan(const Json& body);
  Json register_candidate();
  Json start_mission();
  Json abort_mission(const std::string& reason = "operator abort");
  Json mission_status() const;

  /// Blocks until the running mission (if any) reaches a terminal phase.
  bool wait_mission(std::chrono::milliseconds timeout);

  TelemetryHub& hub() { return hub_; }

 private:
  void regrid_locked();
  Json status_locked() const;
  void ticker_loop();
  void finish_locked();

  SessionConfig cfg_;
  mutable std::mutex mu_;
  std::mutex start_mu_;  // serializes mission starts and ticker joins
  std::condition_variable done_cv_;
  SemanticMap map_{MapFrame::kWorld};
  OccupancyGrid grid_;
  PlanSession plan_;
  std::optional<PlannedPath> candidate_;
  std::optional<MissionRunner> runner_;
  RobotSim robot_;
  TelemetryHub hub_;
  std::thread ticker_;
  std::atomic<bool> stop_{false};
};

}  // namespace agmap::service
