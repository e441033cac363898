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

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "service/session.hpp"

namespace agmap::service {

struct HttpResult {
  int status = 200;
  std::string body;  // JSON
};

/// HTTP + WebSocket front end. Sessions are chosen with the `session` query
/// parameter ("default" when absent) and created on first use.
///
///   POST /capture          run detect -> localize -> merge, returns the map
///   GET  /map, POST /map   export / import the semantic map document
///   GET  /grid             occupancy grid dump
///   POST /plan             {"goal": [i, j, k]} -> candidate path
///   POST /path/register    register the last candidate
///   POST /mission/start    compile registered paths and run the simulator
///   POST /mission/abort    abort the running mission
///   GET  /mission          manager state and robot pose
///   GET  /telemetry        WebSocket: one record per simulator tick
class Server {
 public:
  using SessionFactory = std::function<std::shared_ptr<Session>()>;

  Server(std::string address, unsigned short port, SessionFactory factory);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting; port 0 picks a free port.
  void start();
  void stop();
  unsigned short port() const { return bound_port_; }

  std::shared_ptr<Session> session(const std::string& id);

  /// Transport-free request dispatch.
  HttpResult handle(const std::string& method, const std::string& target, const std::string& body);

 private:
  struct Impl;

  std::string address_;
  unsigned short port_;
  unsigned short bound_port_ = 0;
  SessionFactory factory_;
  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace agmap::service
