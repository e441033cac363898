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

#include "service/session.hpp"

#include <chrono>

#include "agmap/io/image_io.hpp"
#include "agmap/io/replay_backend.hpp"

namespace agmap::service {

namespace {

double wall_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

CellIndex start_cell(const OccupancyGrid& grid, const Pose& pose) {
  auto c = grid.cell_of(pose.position);
  if (!c) fail(ErrorKind::kInvalidInput, "robot pose lies outside the planning workspace");
  return *c;
}

}  // namespace

Session::Session(SessionConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.scenario) cfg_.pipeline = cfg_.scenario->config(cfg_.pipeline);
  cfg_.pipeline.costs.validate();
  robot_ = cfg_.pipeline.sim;
  robot_.pose = cfg_.start_pose;
  robot_.validate();
  require(cfg_.sim_dt > 0.0, "simulator step must be positive");
  grid_ = rasterize(map_, cfg_.pipeline.workspace, cfg_.pipeline.cell_size);
  plan_ = PlanSession(start_cell(grid_, robot_.pose));
}

Session::~Session() {
  stop_ = true;
  std::lock_guard start_lock(start_mu_);
  if (ticker_.joinable()) ticker_.join();
}

void Session::regrid_locked() {
  grid_ = rasterize(map_, cfg_.pipeline.workspace, cfg_.pipeline.cell_size);
  candidate_.reset();
}

Json Session::capture(const Json& body) {
  JsonReader root(body);
  root.expect_object();
  std::lock_guard lock(mu_);
  const bool mission_running = runner_ && !runner_->finished();
  Pose pose = mission_running ? runner_->sim().pose : robot_.pose;
  if (root.has("robot_pose")) pose = pose_from_json(root.at("robot_pose"));

  std::vector<std::string> prompts;
  if (root.has("prompts")) {
    const auto p = root.at("prompts");
    for (size_t i = 0; i < p.array().size(); ++i) prompts.push_back(p.at(i).string());
  }
  const double now = wall_seconds();

  switch (cfg_.backend) {
    case BackendKind::kSynthetic: {
      require(cfg_.scenario.has_value(), "synthetic backend has no scenario loaded");
      if (prompts.empty()) prompts = cfg_.scenario->prompts;
      require(!prompts.empty(), "capture needs prompt labels");
      run_synthetic_capture(map_, *cfg_.scenario, cfg_.pipeline, pose, prompts, now);
      break;
    }
    case BackendKind::kReplay:
    case BackendKind::kRemote: {
      require(!prompts.empty(), "capture needs prompt labels");
      DetectionRequest req;
      req.prompt_labels = prompts;
      if (root.has("image_id")) req.image_id = root.at("image_id").string();
      if (root.has("image_path")) {
        const std::string path = root.at("image_path").string();
        req.image = io::load_rgb(path);
        if (req.image_id.empty()) req.image_id = std::filesystem::path(path).stem().string();
      } else {
        req.image = RgbImage::blank(cfg_.pipeline.camera.width, cfg_.pipeline.camera.height);
      }
      std::optional<DepthMap> explicit_depth;
      if (root.has("depth_file")) {
        DepthScale scale = DepthScale::kMetric;
        if (root.has("depth_scale") && root.at("depth_scale").string() == "relative")
          scale = DepthScale::kRelative;
        explicit_depth = io::load_depth(root.at("depth_file").string(), scale);
      }
      if (cfg_.backend == BackendKind::kReplay) {
        io::ReplayBackend backend(cfg_.replay_dir);
        run_capture(map_, backend, req,
                    [&] { return explicit_depth ? explicit_depth : backend.depth_for(req.image_id); },
                    cfg_.pipeline, pose, now);
      } else {
        io::RemoteBackend backend(cfg_.remote);
        run_capture(map_, backend, req, [&] { return explicit_depth; }, cfg_.pipeline, pose, now);
      }
      break;
    }
  }
  if (!mission_running && plan_.registered().empty() && root.has("robot_pose")) {
    robot_.pose = pose;
    regrid_locked();
    plan_.clear(start_cell(grid_, pose));
  } else {
    regrid_locked();
  }
  return map_.to_json();
}

Json Session::map_document() const {
  std::lock_guard lock(mu_);
  return map_.to_json();
}

Json Session::import_map(const Json& body) {
  SemanticMap imported = SemanticMap::from_json(body);
  if (imported.frame() == MapFrame::kRobotLocal)
    imported = imported.to_world_frame(imported.robot_pose());
  std::lock_guard lock(mu_);
  map_ = std::move(imported);
  regrid_locked();
  return map_.to_json();
}

Json Session::grid_document() const {
  std::lock_guard lock(mu_);
  return grid_.to_json();
}

Json Session::plan(const Json& body) {
  JsonReader root(body);
  root.expect_object();
  std::lock_guard lock(mu_);
  CellIndex goal;
  if (root.has("goal")) {
    goal = cell_from_json(root.at("goal"));
  } else {
    const auto w = root.at("goal_world");
    if (w.array().size() != 3) w.fail("expected [x, y, z]");
    auto c = grid_.cell_of(Vec3(w.at(0).number(), w.at(1).number(), w.at(2).number()));
    if (!c) w.fail("goal lies outside the workspace");
    goal = *c;
  }
  const CellIndex start = plan_.anchor();
  try {
    candidate_ = plan_.plan_next(grid_, goal, cfg_.pipeline.costs);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kUnreachable) throw;
    candidate_.reset();
    return {{"status", "unreachable"}, {"message", e.what()}, {"start", cell_to_json(start)},
            {"goal", cell_to_json(goal)}};
  }
  Json out = path_to_json(*candidate_);
  out["start"] = cell_to_json(start);
  out["goal"] = cell_to_json(goal);
  return out;
}

Json Session::register_candidate() {
  std::lock_guard lock(mu_);
  require(candidate_.has_value(), "no candidate path to register");
  plan_.register_path(grid_, *candidate_);
  candidate_.reset();
  return {{"anchor", cell_to_json(plan_.anchor())},
          {"registered", plan_.registered().size()},
          {"path", path_to_json(concat_registered(plan_))}};
}

Json Session::start_mission() {
  std::lock_guard start_lock(start_mu_);
  std::unique_lock lock(mu_);
  if (runner_ && !runner_->finished())
    throw Error(ErrorKind::kConflict, "a mission is already running");
  const PlannedPath path = concat_registered(plan_);
  Mission mission = compile(path, grid_);
  lock.unlock();
  if (ticker_.joinable()) ticker_.join();  // previous ticker has already exited
  lock.lock();
  if (runner_ && !runner_->finished())
    throw Error(ErrorKind::kConflict, "a mission is already running");

  RobotSim sim = robot_;
  runner_.emplace(std::move(mission), grid_, sim, cfg_.pipeline.mode_switch_s);
  runner_->start();
  for (const auto& e : runner_->take_events()) hub_.publish(state_event_to_json(e).dump());
  if (runner_->finished()) {
    finish_locked();
  } else {
    ticker_ = std::thread([this] { ticker_loop(); });
  }
  Json out = status_locked();
  out["mission"] = mission_to_json(runner_->mission());
  return out;
}

Json Session::abort_mission(const std::string& reason) {
  std::lock_guard lock(mu_);
  if (!runner_ || runner_->finished()) fail(ErrorKind::kProtocol, "no running mission to abort");
  runner_->abort(reason);
  for (const auto& e : runner_->take_events()) hub_.publish(state_event_to_json(e).dump());
  finish_locked();
  return status_locked();
}

void Session::finish_locked() {
  robot_.pose = runner_->sim().pose;
  plan_.clear(start_cell(grid_, robot_.pose));
  candidate_.reset();
  done_cv_.notify_all();
}

Json Session::status_locked() const {
  const Pose pose = runner_ ? runner_->sim().pose : robot_.pose;
  Json out = {{"pose", pose_to_json(pose)}, {"anchor", cell_to_json(plan_.anchor())}};
  if (auto c = grid_.cell_of(pose.position)) out["cell"] = cell_to_json(*c);
  if (runner_) {
    const auto& st = runner_->state();
    out["phase"] = to_string(st.phase);
    out["segment_index"] = st.segment_index;
    out["active_mode"] = to_string(st.active_mode);
    out["t"] = runner_->time();
    if (st.phase == Phase::kAborted) out["reason"] = st.abort_reason;
  } else {
    out["phase"] = to_string(Phase::kIdle);
  }
  return out;
}

Json Session::mission_status() const {
  std::lock_guard lock(mu_);
  Json out = status_locked();
  out["mission"] = runner_ ? mission_to_json(runner_->mission()) : Json(nullptr);
  return out;
}

bool Session::wait_mission(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  return done_cv_.wait_for(lock, timeout, [&] { return !runner_ || runner_->finished(); });
}

void Session::ticker_loop() {
  using namespace std::chrono;
  const auto period = cfg_.time_scale > 0.0
                          ? duration_cast<nanoseconds>(duration<double>(cfg_.sim_dt / cfg_.time_scale))
                          : nanoseconds(0);
  auto next = steady_clock::now();
  while (!stop_) {
    if (period.count() > 0) {
      next += period;
      std::this_thread::sleep_until(next);
    }
    std::lock_guard lock(mu_);
    if (!runner_ || runner_->finished()) return;
    auto rec = runner_->step(cfg_.sim_dt);
    std::vector<StateEvent> terminal;
    for (auto& e : runner_->take_events()) {
      if (is_terminal(e.state.phase))
        terminal.push_back(std::move(e));
      else
        hub_.publish(state_event_to_json(e).dump());
    }
    if (rec) hub_.publish(telemetry_to_json(*rec).dump());
    for (const auto& e : terminal) hub_.publish(state_event_to_json(e).dump());
    if (runner_->finished()) {
      finish_locked();
      return;
    }
  }
}

}  // namespace agmap::service
