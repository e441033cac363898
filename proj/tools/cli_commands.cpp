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

#include "cli_commands.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "agmap/io/image_io.hpp"
#include "agmap/io/replay_backend.hpp"
#include "agmap/pipeline.hpp"

namespace agmap::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kNotFound, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::kNotFound, "cannot write " + path);
  f << text;
}

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

std::vector<double> numbers(const std::string& text, size_t n, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + text + "' is not a comma separated number list");
    }
  }
  if (v.size() != n)
    throw UsageError(what + ": expected " + std::to_string(n) + " values, got '" + text + "'");
  return v;
}

Pose parse_pose(const std::string& text) {
  const auto v = numbers(text, 4, "--pose");
  return Pose(Vec3(v[0], v[1], v[2]), v[3]);
}

CellIndex parse_cell(const std::string& text, const std::string& what) {
  const auto v = numbers(text, 3, what);
  CellIndex c{static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
  if (c.x != v[0] || c.y != v[1] || c.z != v[2])
    throw UsageError(what + ": cell indices must be integers, got '" + text + "'");
  return c;
}

SemanticMap world_map(const Json& doc) {
  SemanticMap m = SemanticMap::from_json(doc);
  if (m.frame() == MapFrame::kRobotLocal) m = m.to_world_frame(m.robot_pose());
  return m;
}

// --- map -------------------------------------------------------------------

struct MapOptions {
  std::string fixture;
  std::vector<std::string> images;
  std::vector<std::string> prompts;
  std::vector<std::string> poses;
  std::string catalog;
  std::string frame = "world";
  std::string out;
};

int cmd_map(const MapOptions& o, std::ostream& out) {
  MapFrame frame = MapFrame::kWorld;
  if (o.frame == "robot_local")
    frame = MapFrame::kRobotLocal;
  else if (o.frame != "world")
    throw UsageError("--frame must be world or robot_local");
  std::vector<Pose> poses;
  for (const auto& p : o.poses) poses.push_back(parse_pose(p));

  SemanticMap map(frame);
  std::optional<DimensionCatalog> catalog;
  if (!o.catalog.empty()) catalog = DimensionCatalog::from_json(read_json(o.catalog));

  if (fs::is_directory(o.fixture)) {
    if (o.images.empty()) throw UsageError("a replay fixture needs at least one --image");
    if (o.prompts.empty()) throw UsageError("a replay fixture needs --prompts");
    if (!(poses.size() <= 1 || poses.size() == o.images.size()))
      throw UsageError("give one --pose, or one per --image");
    PipelineConfig cfg;
    if (catalog) cfg.catalog = *catalog;
    const fs::path cam_file = fs::path(o.fixture) / "camera.json";
    if (fs::exists(cam_file)) {
      const Json cam = read_json(cam_file.string());
      JsonReader r(cam, cam_file.string());
      if (r.has("intrinsics")) cfg.camera = intrinsics_from_json(r.at("intrinsics"));
      if (r.has("extrinsics")) cfg.extrinsics = extrinsics_from_json(r.at("extrinsics"));
    }
    if (frame == MapFrame::kRobotLocal && o.images.size() > 1)
      throw UsageError("a robot_local map holds a single capture");
    io::ReplayBackend backend(o.fixture);
    for (size_t i = 0; i < o.images.size(); ++i) {
      DetectionRequest req;
      req.prompt_labels = o.prompts;
      if (fs::is_regular_file(o.images[i])) {
        req.image = io::load_rgb(o.images[i]);
        req.image_id = fs::path(o.images[i]).stem().string();
      } else {
        req.image = RgbImage::blank(cfg.camera.width, cfg.camera.height);
        req.image_id = o.images[i];
      }
      const Pose pose = poses.empty() ? Pose() : poses[poses.size() == 1 ? 0 : i];
      run_capture(map, backend, req, [&] { return backend.depth_for(req.image_id); }, cfg, pose,
                  static_cast<double>(i));
    }
  } else {
    const Scenario s = Scenario::from_json(read_json(o.fixture));
    PipelineConfig cfg = s.config();
    if (catalog) cfg.catalog = *catalog;
    if (poses.empty()) poses = s.captures;
    if (frame == MapFrame::kRobotLocal && poses.size() > 1)
      throw UsageError("a robot_local map holds a single capture; pass one --pose");
    for (size_t i = 0; i < poses.size(); ++i)
      run_synthetic_capture(map, s, cfg, poses[i], o.prompts, static_cast<double>(i));
  }
  write_text(o.out, pretty(map.to_json()), out);
  return kExitOk;
}

// --- plan ------------------------------------------------------------------

struct GridOptions {
  std::string map;
  std::string fixture;
  std::string workspace;
  double cell_size = 0.0;
};

OccupancyGrid build_grid(const GridOptions& o) {
  Workspace ws;
  double cell = kDefaultCellSize;
  if (!o.fixture.empty()) {
    const Scenario s = Scenario::from_json(read_json(o.fixture));
    ws = s.workspace;
    cell = s.cell_size;
  }
  if (!o.workspace.empty()) ws = parse_workspace_size(o.workspace);
  if (o.cell_size > 0.0) cell = o.cell_size;
  const SemanticMap map = o.map.empty() ? SemanticMap(MapFrame::kWorld) : world_map(read_json(o.map));
  return rasterize(map, ws, cell);
}

struct PlanOptions {
  GridOptions grid;
  std::string start;
  std::vector<std::string> goals;
  bool register_paths = false;
  std::string out;
};

int cmd_plan(const PlanOptions& o, std::ostream& out) {
  const CellIndex start = parse_cell(o.start, "--start");
  std::vector<CellIndex> goals;
  for (const auto& g : o.goals) goals.push_back(parse_cell(g, "--goal"));
  const OccupancyGrid grid = build_grid(o.grid);
  require(grid.contains(start), "start " + start.str() + " lies outside the grid");

  PlanSession session(start);
  Json legs = Json::array();
  Json doc;
  if (goals.size() > 1 || o.register_paths) {
    for (const auto& g : goals) {
      PlannedPath leg = session.plan_next(grid, g);
      session.register_path(grid, leg);
      legs.push_back(path_to_json(session.registered().back()));
    }
    doc = path_to_json(concat_registered(session));
  } else {
    const PlannedPath p = session.plan_next(grid, goals.front());
    legs.push_back(path_to_json(p));
    doc = path_to_json(p);
  }
  doc["start"] = cell_to_json(start);
  doc["anchor"] = cell_to_json(session.anchor());
  doc["legs"] = std::move(legs);
  doc["grid"] = grid.to_json();
  write_text(o.out, pretty(doc), out);
  return kExitOk;
}

// --- mission ---------------------------------------------------------------

struct MissionOptions {
  GridOptions grid;
  std::string path;
  std::string telemetry;
  double dt = 0.05;
  double mode_switch_s = 1.0;
  std::string out;
};

int cmd_mission(const MissionOptions& o, std::ostream& out) {
  if (!(o.dt > 0.0)) throw UsageError("--dt must be positive");
  const Json doc = read_json(o.path);
  JsonReader root(doc, o.path);
  root.expect_object();
  const PlannedPath path = path_from_json(root.has("path") ? root.at("path") : root);
  const OccupancyGrid grid =
      root.has("grid") ? OccupancyGrid::from_json(doc.at("grid")) : build_grid(o.grid);
  const Mission mission = compile(path, grid);

  RobotSim sim;
  sim.pose = Pose(grid.center(path.cells.front()), 0.0);
  MissionRunner runner(mission, grid, sim, o.mode_switch_s);

  Json log = Json::array();
  runner.start();
  for (const auto& e : runner.take_events()) log.push_back(state_event_to_json(e));
  while (!runner.finished()) {
    require(runner.time() < 36000.0, "simulation exceeded the time limit");
    const auto rec = runner.step(o.dt);
    auto events = runner.take_events();
    for (const auto& e : events)
      if (!is_terminal(e.state.phase)) log.push_back(state_event_to_json(e));
    if (rec) log.push_back(telemetry_to_json(*rec));
    for (const auto& e : events)
      if (is_terminal(e.state.phase)) log.push_back(state_event_to_json(e));
  }

  Json result = {{"phase", to_string(runner.state().phase)},
                 {"t", runner.time()},
                 {"pose", pose_to_json(runner.sim().pose)}};
  if (auto c = grid.cell_of(runner.sim().pose.position)) result["cell"] = cell_to_json(*c);
  Json report = {{"mission", mission_to_json(mission)}, {"result", std::move(result)}};
  if (o.telemetry.empty()) {
    report["telemetry"] = std::move(log);
  } else {
    std::string lines;
    for (const auto& rec : log) lines += rec.dump() + "\n";
    write_text(o.telemetry, lines, out);
  }
  write_text(o.out, pretty(report), out);
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalOptions {
  std::string estimates;
  std::string truth;
  std::string table;
  std::string model = "agmap";
  double time_s = 0.0;
  double gate_m = 1.0;
  std::string format = "text";
  std::string out;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  if (o.estimates.empty() != o.truth.empty())
    throw UsageError("--estimates and --truth go together");
  if (o.estimates.empty() && o.table.empty())
    throw UsageError("give --estimates/--truth, --table-1-fixtures, or both");
  if (o.format != "text" && o.format != "csv" && o.format != "json")
    throw UsageError("--format must be text, csv or json");

  std::vector<EvalReport> reports;
  if (!o.table.empty()) reports = reports_from_json(read_json(o.table));
  std::optional<MatchResult> match;
  if (!o.estimates.empty()) {
    const SemanticMap est = world_map(read_json(o.estimates));
    const GroundTruthSet truth = GroundTruthSet::from_json(read_json(o.truth), o.truth);
    match = match_and_score(est, truth, o.gate_m);
    reports.push_back(EvalReport::from_match(o.model, *match, o.time_s));
  }
  const ReportTable table = emit_report(reports);
  std::string text;
  if (o.format == "json") {
    text = pretty(table.document);
  } else if (o.format == "csv") {
    text = table.csv;
  } else {
    text = table.text;
    if (match) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "\n%s: matched %zu/%zu, mean error %.3f m, median %.3f m, p90 %.3f m\n",
                    o.model.c_str(), match->matched, match->total, match->stats.mean,
                    match->stats.median, match->stats.p90);
      text += buf;
    }
  }
  write_text(o.out, text, out);
  return kExitOk;
}

void add_grid_options(CLI::App* cmd, GridOptions& g) {
  cmd->add_option("--map", g.map, "semantic map document (world or robot_local frame)");
  cmd->add_option("--fixture", g.fixture, "scenario file supplying workspace and cell size");
  cmd->add_option("--workspace", g.workspace, "workspace extents WxDxH in meters (default 5x8x3)");
  cmd->add_option("--cell-size", g.cell_size, "grid cell edge in meters (default 0.5)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"agmap: semantic mapping, planning and mission simulation"};
  app.require_subcommand(1);

  MapOptions map_o;
  auto* map_cmd = app.add_subcommand("map", "detect, localize and merge captures into a map");
  map_cmd->add_option("--fixture", map_o.fixture, "scenario file (synthetic) or replay directory")
      ->required();
  map_cmd->add_option("--image", map_o.images, "image file or image id (replay; repeatable)");
  map_cmd->add_option("--prompts", map_o.prompts, "comma separated prompt labels")->delimiter(',');
  map_cmd->add_option("--pose", map_o.poses, "robot pose x,y,z,yaw (repeatable)");
  map_cmd->add_option("--catalog", map_o.catalog, "dimension catalog document");
  map_cmd->add_option("--frame", map_o.frame, "world or robot_local");
  map_cmd->add_option("-o,--out", map_o.out, "output file (default stdout)");

  PlanOptions plan_o;
  auto* plan_cmd = app.add_subcommand("plan", "plan paths over the occupancy grid");
  add_grid_options(plan_cmd, plan_o.grid);
  plan_cmd->add_option("--start", plan_o.start, "start cell i,j,k")->required();
  plan_cmd->add_option("--goal", plan_o.goals, "goal cell i,j,k (repeat for multiple stops)")
      ->required();
  plan_cmd->add_flag("--register", plan_o.register_paths, "register each leg");
  plan_cmd->add_option("-o,--out", plan_o.out, "output file (default stdout)");

  MissionOptions mis_o;
  auto* mis_cmd = app.add_subcommand("mission", "compile a path and simulate it");
  add_grid_options(mis_cmd, mis_o.grid);
  mis_cmd->add_option("--path", mis_o.path, "path document from `plan`")->required();
  mis_cmd->add_option("--telemetry", mis_o.telemetry, "write the telemetry log here (JSON lines)");
  mis_cmd->add_option("--dt", mis_o.dt, "simulator step in seconds");
  mis_cmd->add_option("--mode-switch", mis_o.mode_switch_s, "mode switch time in seconds");
  mis_cmd->add_option("-o,--out", mis_o.out, "output file (default stdout)");

  EvalOptions eval_o;
  auto* eval_cmd = app.add_subcommand("eval", "score estimates and print the detector table");
  eval_cmd->add_option("--estimates", eval_o.estimates, "estimated semantic map");
  eval_cmd->add_option("--truth", eval_o.truth, "ground-truth object positions");
  eval_cmd->add_option("--table-1-fixtures", eval_o.table, "recorded detector report rows");
  eval_cmd->add_option("--model", eval_o.model, "row name for the scored estimates");
  eval_cmd->add_option("--time", eval_o.time_s, "mean calculation time for the scored row");
  eval_cmd->add_option("--gate", eval_o.gate_m, "match gate in meters");
  eval_cmd->add_option("--format", eval_o.format, "text, csv or json");
  eval_cmd->add_option("-o,--out", eval_o.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*map_cmd) return cmd_map(map_o, out);
    if (*plan_cmd) return cmd_plan(plan_o, out);
    if (*mis_cmd) return cmd_mission(mis_o, out);
    if (*eval_cmd) return cmd_eval(eval_o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace agmap::cli
