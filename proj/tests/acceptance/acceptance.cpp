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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "agmap/eval.hpp"
#include "agmap/geometry.hpp"
#include "agmap/grid.hpp"
#include "agmap/localize.hpp"
#include "agmap/mission.hpp"
#include "agmap/pipeline.hpp"
#include "agmap/planner.hpp"
#include "agmap/semantic_map.hpp"
#include "agmap/synthetic.hpp"
#include "cli_commands.hpp"
#include "service/server.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

namespace agmap {
namespace {

namespace fs = std::filesystem;
using testing::Rng;

/// Collects failed expectations; the first few are echoed in the report.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (messages_.size() < 5) messages_.push_back(what);
  }
  void note(const std::string& line) { notes_.push_back(line); }

  bool ok() const { return failures_ == 0; }
  int failures() const { return failures_; }
  const std::vector<std::string>& messages() const { return messages_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  int failures_ = 0;
  std::vector<std::string> messages_;
  std::vector<std::string> notes_;
};

struct Criterion {
  std::string name;
  double budget_s;  // <= 0: no runtime bound
  std::function<void(Check&)> body;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv(const CellIndex& c) {
  return std::to_string(c.x) + "," + std::to_string(c.y) + "," + std::to_string(c.z);
}

std::string str(const CellIndex& c) { return "(" + csv(c) + ")"; }

// --- pinhole distance ----------------------------------------------------------

void pinhole_exactness(Check& c) {
  CameraIntrinsics cam;
  cam.focal_px = 500;
  c.expect(distance_from_bbox({300, 115, 340, 365}, cam, 1.0) == 2.0, "f=500 h=250 H=1");
  c.expect(distance_from_bbox({300, -10, 340, 490}, cam, 0.5) == 0.5, "f=500 h=500 H=0.5");
  cam.focal_px = 800;
  c.expect(distance_from_bbox({0, 0, 10, 170}, cam, 1.7) == 8.0, "f=800 h=170 H=1.7");

  Rng rng(1);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    CameraIntrinsics k;
    k.focal_px = rng.uniform(50, 3000);
    const double y0 = rng.uniform(-100, 400);
    const double y1 = y0 + rng.uniform(0.5, 900);
    const double h_m = rng.uniform(0.01, 5);
    const BoundingBox box{rng.uniform(0, 300), y0, rng.uniform(300, 640), y1};
    const double want = k.focal_px * h_m / (y1 - y0);
    const double got = distance_from_bbox(box, k, h_m);
    const double rel = std::abs(got - want) / want;
    worst = std::max(worst, rel);
    c.expect(rel <= 1e-12, "sample " + std::to_string(i));
  }
  std::ostringstream os;
  os << "max relative error " << worst << " over 1000 samples";
  c.note(os.str());
}

// --- fusion --------------------------------------------------------------------

void fusion_contract(Check& c) {
  const auto f = fuse_distance(2.0, 3.0);
  c.expect(f.fused_m == 2.2, "fuse(2, 3) == 2.2");
  c.expect(f.method == DistanceMethod::kFused, "fused method");
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.uniform(0.05, 30);
    const auto e = fuse_distance(std::nullopt, d);
    c.expect(e.fused_m == d && e.method == DistanceMethod::kDepthOnly, "depth only returns the depth");
  }
}

// --- synthetic localization ----------------------------------------------------

constexpr int kSceneObjects = 20;

/// Objects fanned around the robot 18 degrees apart so their images never
/// overlap; each one is viewed head-on by its own capture.
SyntheticScene fan_scene(Rng& rng) {
  SyntheticScene s;
  for (int i = 0; i < kSceneObjects; ++i) {
    const double bearing = i * 2 * std::numbers::pi / kSceneObjects;
    const double r = rng.uniform(2, 6);
    const Dimensions dims{rng.uniform(0.3, 1.0), rng.uniform(0.15, 0.35), rng.uniform(0.15, 0.35)};
    s.objects.push_back(
        {"object " + std::to_string(i), Vec3(r * std::cos(bearing), r * std::sin(bearing), dims.h / 2), dims});
  }
  return s;
}

struct Sample {
  double distance;
  double error;
};

/// Localizes every object of `scene`; `noise` scales each box height about
/// its center by a factor in [1 - noise, 1 + noise].
std::vector<Sample> localize_fan(const SyntheticScene& scene, Rng& rng, double noise, Check& c) {
  std::vector<Sample> out;
  for (int i = 0; i < kSceneObjects; ++i) {
    SyntheticScene view = scene;
    const Vec3& p = scene.objects[i].position;
    view.camera.pose = Pose(0, 0, 0.5, std::atan2(p.y(), p.x()));
    const auto dets = synthetic_render(view);
    const DepthMap depth = synthetic_depth(view);
    const Detection* det = nullptr;
    for (const auto& d : dets)
      if (d.label == scene.objects[i].label) det = &d;
    c.expect(det != nullptr, scene.objects[i].label + " not rendered");
    if (!det) continue;
    Detection noisy = *det;
    if (noise > 0) {
      const double k = rng.uniform(1 - noise, 1 + noise);
      const double cy = noisy.bbox.center().y();
      const double half = 0.5 * (noisy.bbox.y_max - noisy.bbox.y_min) * k;
      noisy.bbox.y_min = cy - half;
      noisy.bbox.y_max = cy + half;
    }
    const auto lo = localize_object(noisy, &depth, view.camera.intrinsics, scene.objects[i].dimensions,
                                    view.camera.pose, view.camera.extrinsics);
    out.push_back({(p - view.camera.pose.position).norm(), (lo.object.position - p).norm()});
  }
  return out;
}

double mean_error(const std::vector<Sample>& s) {
  double sum = 0;
  for (const auto& x : s) sum += x.error;
  return s.empty() ? 0 : sum / static_cast<double>(s.size());
}

void synthetic_localization(Check& c) {
  Rng rng(3);
  const auto exact = localize_fan(fan_scene(rng), rng, 0.0, c);
  c.expect(exact.size() == kSceneObjects, "every object localized");
  const double exact_mean = mean_error(exact);
  c.expect(exact_mean < 1e-3, "exact mean error below 1 mm");

  std::vector<Sample> all;
  double worst_trial = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Rng trial_rng(1000 + trial);
    const auto samples = localize_fan(fan_scene(trial_rng), trial_rng, 0.05, c);
    const double m = mean_error(samples);
    worst_trial = std::max(worst_trial, m);
    c.expect(m <= 0.35, "trial " + std::to_string(trial) + " mean error " + std::to_string(m));
    all.insert(all.end(), samples.begin(), samples.end());
  }
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << "exact mean " << exact_mean * 1000 << " mm; noisy mean "
     << mean_error(all) << " m, worst trial " << worst_trial << " m";
  c.note(os.str());

  // Error against distance, one meter per bin.
  std::map<int, std::vector<Sample>> bins;
  for (const auto& s : all) bins[std::min(5, static_cast<int>(s.distance))].push_back(s);
  double prev = -1;
  for (const auto& [lo, samples] : bins) {
    const double m = mean_error(samples);
    std::ostringstream line;
    line << std::fixed << std::setprecision(4) << lo << "-" << lo + 1 << " m: mean error " << m << " m (n="
         << samples.size() << ")";
    c.note(line.str());
    c.expect(m > prev, "error grows with distance at " + std::to_string(lo) + " m");
    prev = m;
  }
}

// --- planner -------------------------------------------------------------------

void planner_optimality(Check& c) {
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  Rng rng(4);
  int solved = 0;
  int unreachable = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto g = testing::random_grid(rng);
    const auto s = testing::random_free_cell(rng, g);
    const auto t = testing::random_free_cell(rng, g);
    const auto want = testing::dijkstra_oracle(g, s)[g.linear(t)];
    const std::string tag = "grid " + std::to_string(trial);
    if (want == kInf) {
      ++unreachable;
      bool threw = false;
      try {
        plan(g, s, t);
      } catch (const Error& e) {
        threw = e.kind() == ErrorKind::kUnreachable;
      }
      c.expect(threw, tag + ": unreachable goal not reported");
      continue;
    }
    const auto p = plan(g, s, t);
    ++solved;
    c.expect(!p.cells.empty() && p.cells.front() == s && p.cells.back() == t, tag + ": endpoints");
    c.expect(path_cost_units(g, p.cells, {}) == want, tag + ": cost differs from Dijkstra");
    c.expect(quantize_cost(p.cost) == want, tag + ": reported cost differs from Dijkstra");
  }
  c.note(std::to_string(solved) + " solved, " + std::to_string(unreachable) + " unreachable; all match Dijkstra");

  Rng gap_rng(5);
  int ground = 0;
  constexpr int kTrials = 100;
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto s = testing::equal_gap_wall(gap_rng);
    const auto p = plan(s.grid, s.start, s.goal);
    int wall_x = -1;
    for (int x = 0; x < s.grid.nx() && wall_x < 0; ++x)
      if (s.grid.state({x, s.start.y, 1}) == CellState::kOccupied) wall_x = x;
    ground += testing::crossing(p.cells, wall_x).z == 0;
  }
  c.expect(ground == kTrials, "equal-gap ground route in " + std::to_string(ground) + "/100");
  c.note("equal-gap wall: ground route in " + std::to_string(ground) + "/" + std::to_string(kTrials));
}

// --- mission compilation -------------------------------------------------------

std::vector<CellIndex> random_walk(Rng& rng, const OccupancyGrid& g) {
  std::vector<CellIndex> cells{{rng.integer(0, g.nx() - 1), rng.integer(0, g.ny() - 1), 0}};
  const int n = rng.integer(0, 30);
  while (static_cast<int>(cells.size()) <= n) {
    const CellIndex& cur = cells.back();
    const int dz = rng.coin(0.7) ? 0 : rng.integer(-1, 1);
    const CellIndex next{cur.x + rng.integer(-1, 1), cur.y + rng.integer(-1, 1), cur.z + dz};
    if (g.contains(next) && next != cur) cells.push_back(next);
  }
  return cells;
}

std::vector<SegmentKind> kinds(const Mission& m) {
  std::vector<SegmentKind> out;
  for (const auto& s : m.segments) out.push_back(s.kind);
  return out;
}

void mission_compilation(Check& c) {
  const OccupancyGrid g(Vec3::Zero(), 0.5, 10, 10, 4);
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const auto cells = random_walk(rng, g);
    const auto m = compile({cells, 0.0, PathStatus::kRegistered}, g);
    const std::string tag = "walk " + std::to_string(trial);
    c.expect(m.flatten() == cells, tag + ": concatenation differs from the path");
    c.expect(m.count(SegmentKind::kTakeoff) == testing::takeoff_count(cells), tag + ": takeoff count");
  }

  using K = SegmentKind;
  const std::vector<K> canonical{K::kGroundMove, K::kTakeoff, K::kFlight, K::kLand, K::kGroundMove};
  const auto literal =
      compile({{{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {2, 0, 1}, {2, 0, 0}, {3, 0, 0}}, 0.0, PathStatus::kRegistered}, g);
  c.expect(kinds(literal) == canonical, "hand-written canonical path");

  // The same shape produced by the planner over a wall with an opening up high.
  const auto wall = testing::cruise_opening_wall();
  auto planned = plan(wall.grid, wall.start, wall.goal);
  planned.status = PathStatus::kRegistered;
  const auto m = compile(planned, wall.grid);
  c.expect(kinds(m) == canonical, "planned wall crossing");
  std::string seq;
  for (const auto& s : m.segments) seq += (seq.empty() ? "" : ", ") + std::string(to_string(s.kind));
  c.note("wall crossing compiles to [" + seq + "]");
}

// --- registration ----------------------------------------------------------------

void registration_semantics(Check& c) {
  Rng rng(7);
  int legs_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testing::random_grid(rng, 3);
    PlanSession session(testing::random_free_cell(rng, g));
    const int legs = rng.integer(2, 5);
    for (int k = 0; k < legs; ++k) {
      const auto goal = testing::random_free_cell(rng, g);
      PlannedPath cand;
      try {
        cand = session.plan_next(g, goal);
      } catch (const Error&) {
        continue;
      }
      const CellIndex anchor = session.anchor();
      c.expect(cand.cells.front() == anchor, "session " + std::to_string(trial) + ": candidate starts at anchor");
      session.register_path(g, cand);
      c.expect(session.anchor() == cand.cells.back(), "session " + std::to_string(trial) + ": anchor moves");
      ++legs_checked;
    }
    const auto whole = concat_registered(session);
    if (!whole.cells.empty()) c.expect(whole.cells.back() == session.anchor(), "concatenation ends at anchor");
  }
  c.note(std::to_string(legs_checked) + " registered legs over 100 sessions");
}

// --- report table ------------------------------------------------------------------

void table_harness(Check& c) {
  const auto reports = reports_from_json(Json::parse(slurp(testing::fixture("table1_reports.json"))));
  const auto table = emit_report(reports);
  const std::string want = slurp(testing::test_fixture("table1_expected.csv"));
  c.expect(table.csv == want, "CSV differs from the expected rows");
  c.expect(table.csv.find("Grounding Dino 1.5 pro, 97.4, 7.34\n") != std::string::npos, "Grounding Dino row");
  c.expect(format_ratio(detection_ratio(38, 39)) == "97.4", "38/39 prints 97.4");
  std::istringstream rows(table.csv);
  for (std::string line; std::getline(rows, line);) c.note(line);
}

// --- map documents -------------------------------------------------------------------

void json_round_trip(Check& c) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const SemanticMap m = testing::random_map(rng);
    const std::string text = m.to_json().dump();
    const SemanticMap back = SemanticMap::from_json(Json::parse(text));
    c.expect(back == m, "map " + std::to_string(i) + " changed on import");
    c.expect(back.to_json().dump() == text, "map " + std::to_string(i) + " re-exports differently");
  }

  const Json good = Json::parse(R"({"frame": "world", "objects": [
      {"id": 1, "label": "box", "x": 0, "y": 0, "z": 0, "h": 1, "w": 1, "d": 1,
       "confidence": 0.5, "method": "fused"}]})");
  auto path_of = [](const Json& doc) -> std::string {
    try {
      SemanticMap::from_json(doc);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::kSchema ? e.path() : "<wrong kind>";
    }
    return "<accepted>";
  };
  const std::vector<std::pair<std::function<void(Json&)>, std::string>> cases{
      {[](Json& j) { j["objects"][0].erase("y"); }, "objects[0].position"},
      {[](Json& j) { j["objects"][0]["label"] = 3; }, "objects[0].label"},
      {[](Json& j) { j["objects"][0]["confidence"] = 1.5; }, "objects[0].confidence"},
      {[](Json& j) { j["objects"][0]["method"] = "lidar"; }, "objects[0].method"},
      {[](Json& j) { j["objects"].push_back(j["objects"][0]); }, "objects[1].id"},
      {[](Json& j) { j["frame"] = "camera"; }, "frame"},
      {[](Json& j) { j.erase("objects"); }, "objects"},
  };
  for (const auto& [mutate, want] : cases) {
    Json j = good;
    mutate(j);
    const std::string got = path_of(j);
    c.expect(got == want, "expected error at " + want + ", got " + got);
  }
  c.note("1000 maps round-trip byte for byte; " + std::to_string(cases.size()) + " schema violations named");
}

// --- search and rescue ----------------------------------------------------------------

/// Free ground cell next to the target, nearest to it first, that the planner
/// can reach from `from`.
std::optional<CellIndex> target_adjacent_goal(const OccupancyGrid& g, const SemanticMap& map,
                                              const std::string& label, const CellIndex& from) {
  const SemanticObject* target = nullptr;
  for (const auto& o : map.objects())
    if (o.label == label) target = &o;
  if (!target) return std::nullopt;
  const auto tc = g.cell_of(Vec3(target->position.x(), target->position.y(), 0.0));
  if (!tc) return std::nullopt;
  std::vector<CellIndex> cands;
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy) {
      const CellIndex n{tc->x + dx, tc->y + dy, 0};
      if ((dx || dy) && g.contains(n) && g.state(n) != CellState::kOccupied) cands.push_back(n);
    }
  const Vec3 at(target->position.x(), target->position.y(), g.center({0, 0, 0}).z());
  std::stable_sort(cands.begin(), cands.end(), [&](const CellIndex& a, const CellIndex& b) {
    return (g.center(a) - at).norm() < (g.center(b) - at).norm();
  });
  for (const auto& n : cands) {
    try {
      plan(g, from, n);
      return n;
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

size_t count_takeoffs(const Json& mission) {
  size_t n = 0;
  for (const auto& s : mission["segments"]) n += s["kind"] == "Takeoff";
  return n;
}

void service_flow(Check& c, const Scenario& scenario, const Json& doc) {
  service::SessionConfig cfg;
  cfg.scenario = scenario;
  cfg.pipeline = scenario.config(cfg.pipeline);
  cfg.start_pose = scenario.start_pose;
  cfg.time_scale = 0;
  service::Server server("127.0.0.1", 0, [cfg] { return std::make_shared<service::Session>(cfg); });
  auto call = [&](const std::string& method, const std::string& target, const Json& body) {
    const auto r = server.handle(method, target, body.dump());
    c.expect(r.status == 200, method + " " + target + " -> " + std::to_string(r.status) + " " + r.body);
    return Json::parse(r.body);
  };
  auto has_target = [&](const Json& map) {
    for (const auto& o : map["objects"])
      if (o["label"] == scenario.target_label) return true;
    return false;
  };
  auto grid_of = [&](const Json& map) {
    return rasterize(SemanticMap::from_json(map), scenario.workspace, scenario.cell_size);
  };
  auto run_leg = [&](const CellIndex& goal) {
    const Json p = call("POST", "/plan", {{"goal", cell_to_json(goal)}});
    call("POST", "/path/register", Json::object());
    const Json started = call("POST", "/mission/start", Json::object());
    server.session("default")->wait_mission(std::chrono::seconds(20));
    return std::pair{count_takeoffs(started["mission"]), call("GET", "/mission", Json::object())};
  };

  // First look: the wall hides the target.
  Json map = call("POST", "/capture", {{"robot_pose", doc["captures"][0]}});
  c.expect(!has_target(map), "target visible before crossing the wall");
  auto g = grid_of(map);
  const auto lookout = g.cell_of(scenario.captures.at(1).position);
  c.expect(lookout.has_value(), "second capture point inside the workspace");
  if (!lookout) return;
  auto [takeoffs, status] = run_leg(*lookout);
  c.expect(status["phase"] == "Completed", "first leg completed");

  // Second look from beyond the wall.
  map = call("POST", "/capture", Json::object());
  c.expect(has_target(map), "target found from the second capture point");
  g = grid_of(map);
  const auto goal = target_adjacent_goal(g, SemanticMap::from_json(map), scenario.target_label, *lookout);
  c.expect(goal.has_value(), "reachable cell next to the target");
  if (!goal) return;
  auto [takeoffs2, final_status] = run_leg(*goal);
  takeoffs += takeoffs2;
  c.expect(final_status["phase"] == "Completed", "service: mission completed");
  c.expect(final_status["cell"] == cell_to_json(*goal), "service: robot at " + str(*goal));
  c.expect(takeoffs >= 1, "service: at least one takeoff");
  c.note("service: Completed at " + final_status["cell"].dump() + " with " + std::to_string(takeoffs) +
         " takeoff(s), t = " + final_status["t"].dump() + " s");
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "agmap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void cli_flow(Check& c, const Scenario& scenario, const std::string& fixture) {
  const fs::path dir = fs::temp_directory_path() / "agmap_acceptance";
  fs::create_directories(dir);
  const std::string map_file = (dir / "map.json").string();
  const std::string path_file = (dir / "path.json").string();

  const auto m = cli({"map", "--fixture", fixture, "-o", map_file});
  c.expect(m.code == 0, "cli map: " + m.err);
  if (m.code != 0) return;
  const SemanticMap map = SemanticMap::from_json(Json::parse(slurp(map_file)));
  const auto g = rasterize(map, scenario.workspace, scenario.cell_size);
  const auto start = g.cell_of(scenario.start_pose.position);
  c.expect(start.has_value(), "start inside the workspace");
  if (!start) return;
  const auto goal = target_adjacent_goal(g, map, scenario.target_label, *start);
  c.expect(goal.has_value(), "cli: reachable cell next to the target");
  if (!goal) return;

  const auto p = cli({"plan", "--map", map_file, "--fixture", fixture, "--start", csv(*start),
                      "--goal", csv(*goal), "--register", "-o", path_file});
  c.expect(p.code == 0, "cli plan: " + p.err);
  if (p.code != 0) return;
  const auto r = cli({"mission", "--path", path_file});
  c.expect(r.code == 0, "cli mission: " + r.err);
  if (r.code != 0) return;
  const Json out = Json::parse(r.out);
  const size_t takeoffs = count_takeoffs(out["mission"]);
  c.expect(out["result"]["phase"] == "Completed", "cli: mission completed");
  c.expect(out["result"]["cell"] == cell_to_json(*goal), "cli: robot at " + str(*goal));
  c.expect(takeoffs >= 1, "cli: at least one takeoff");
  c.note("cli: Completed at " + out["result"]["cell"].dump() + " with " + std::to_string(takeoffs) +
         " takeoff(s), t = " + out["result"]["t"].dump() + " s");
}

void search_and_rescue(Check& c) {
  const std::string fixture = testing::fixture("search_rescue.json");
  const Json doc = Json::parse(slurp(fixture));
  const Scenario scenario = Scenario::from_json(doc);
  service_flow(c, scenario, doc);
  cli_flow(c, scenario, fixture);
}

// --- driver ---------------------------------------------------------------------------

int run_all() {
  const std::vector<Criterion> criteria{
      {"pinhole distance exact on 1000 samples", 1.0, pinhole_exactness},
      {"fusion weights and depth-only fallback", 1.0, fusion_contract},
      {"synthetic 20-object localization", 30.0, synthetic_localization},
      {"planner matches Dijkstra; equal gaps stay on the ground", 60.0, planner_optimality},
      {"mission compilation on 500 paths", 10.0, mission_compilation},
      {"registration moves the planning anchor", 0.0, registration_semantics},
      {"detector table reproduced byte for byte", 1.0, table_harness},
      {"map JSON round trip and schema errors", 0.0, json_round_trip},
      {"search and rescue flow via service and CLI", 30.0, search_and_rescue},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = cr.budget_s <= 0 || dt < cr.budget_s;
    const bool pass = check.ok() && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << cr.name << "  (" << std::fixed << std::setprecision(2) << dt
              << " s";
    if (cr.budget_s > 0) std::cout << " of " << cr.budget_s << " s";
    std::cout << ")\n";
    for (const auto& n : check.notes()) std::cout << "      " << n << "\n";
    for (const auto& m : check.messages()) std::cout << "      failed: " << m << "\n";
    if (check.failures() > static_cast<int>(check.messages().size()))
      std::cout << "      ... " << check.failures() << " failures in total\n";
    if (!in_time) std::cout << "      over the runtime budget\n";
  }
  std::cout << (failed ? "FAILED " : "all ") << (failed ? std::to_string(failed) + " of " : "")
            << criteria.size() << " criteria" << (failed ? "" : " passed") << "\n";
  return failed ? 1 : 0;
}

}  // namespace
}  // namespace agmap

int main() { return agmap::run_all(); }
