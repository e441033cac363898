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

#include <CLI11.hpp>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "service/server.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

agmap::Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) agmap::fail(agmap::ErrorKind::kNotFound, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return agmap::parse_json(ss.str(), path);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace agmap;
  CLI::App app{"agmap ground-station service"};
  std::string address = "0.0.0.0";
  unsigned short port = 8080;
  std::string workspace;
  double cell_size = 0.0;
  std::string catalog;
  std::string backend = "synthetic";
  std::string fixture;
  double time_scale = 1.0;
  app.add_option("--address", address, "listen address");
  app.add_option("--port", port, "listen port (0 picks a free one)");
  app.add_option("--workspace", workspace, "workspace extents WxDxH in meters");
  app.add_option("--cell-size", cell_size, "grid cell edge in meters");
  app.add_option("--catalog", catalog, "dimension catalog document");
  app.add_option("--backend", backend, "detector backend")
      ->check(CLI::IsMember({"replay", "remote", "synthetic"}));
  app.add_option("--fixture", fixture, "scenario file (synthetic) or fixture directory (replay)");
  app.add_option("--time-scale", time_scale, "simulator speed-up; 0 runs as fast as possible");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    service::SessionConfig cfg;
    cfg.time_scale = time_scale;
    if (backend == "synthetic") {
      if (fixture.empty()) {
        std::cerr << "--backend synthetic needs --fixture SCENARIO.json\n";
        return 2;
      }
      cfg.backend = service::BackendKind::kSynthetic;
      cfg.scenario = Scenario::from_json(read_json(fixture));
      cfg.start_pose = cfg.scenario->start_pose;
    } else if (backend == "replay") {
      if (fixture.empty() || !std::filesystem::is_directory(fixture)) {
        std::cerr << "--backend replay needs --fixture DIR\n";
        return 2;
      }
      cfg.backend = service::BackendKind::kReplay;
      cfg.replay_dir = fixture;
    } else {
      cfg.backend = service::BackendKind::kRemote;
      cfg.remote = io::RemoteConfig::from_env();
    }
    if (cfg.scenario) cfg.pipeline = cfg.scenario->config(cfg.pipeline);
    if (!workspace.empty()) {
      cfg.pipeline.workspace = parse_workspace_size(workspace);
      if (cfg.scenario) cfg.scenario->workspace = cfg.pipeline.workspace;
    }
    if (cell_size > 0.0) {
      cfg.pipeline.cell_size = cell_size;
      if (cfg.scenario) cfg.scenario->cell_size = cell_size;
    }
    if (!catalog.empty()) {
      cfg.pipeline.catalog = DimensionCatalog::from_json(read_json(catalog));
      if (cfg.scenario) cfg.scenario->catalog = cfg.pipeline.catalog;
    }

    service::Server server(address, port, [cfg] { return std::make_shared<service::Session>(cfg); });
    server.session("default");  // surface configuration errors before listening
    server.start();
    std::cout << "listening on " << address << ":" << server.port() << std::endl;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 1;
  }
  return 0;
}
