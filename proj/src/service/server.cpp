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

#include "service/server.hpp"

#include <sys/socket.h>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <atomic>
#include <set>
#include <sstream>
#include <vector>
#include <thread>

namespace agmap::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kConflict: return 409;
    case ErrorKind::kBackend: return 502;
    case ErrorKind::kInvalidInput:
    case ErrorKind::kSchema:
    case ErrorKind::kEmptyRegion:
    case ErrorKind::kMissingReference:
    case ErrorKind::kDegenerateReference:
    case ErrorKind::kAnchor:
    case ErrorKind::kInvalidPath:
    case ErrorKind::kEmptySession:
    case ErrorKind::kInvalidStart:
    case ErrorKind::kProtocol:
    case ErrorKind::kUnreachable: return 400;
  }
  return 500;
}

std::string error_body(const Error& e) {
  Json j = {{"error", to_string(e.kind())}, {"message", e.what()}};
  if (!e.path().empty()) j["path"] = e.path();
  return j.dump();
}

struct Target {
  std::string path;
  std::string session = "default";
};

Target parse_target(const std::string& target) {
  Target t;
  const auto q = target.find('?');
  t.path = target.substr(0, q);
  if (q == std::string::npos) return t;
  std::stringstream query(target.substr(q + 1));
  std::string kv;
  while (std::getline(query, kv, '&')) {
    const auto eq = kv.find('=');
    if (eq != std::string::npos && kv.compare(0, eq, "session") == 0 && eq + 1 < kv.size())
      t.session = kv.substr(eq + 1);
  }
  return t;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  return parse_json(body, "body");
}

}  // namespace

struct Server::Impl {
  asio::io_context ioc;
  std::unique_ptr<tcp::acceptor> acceptor;
  std::thread accept_thread;
  std::atomic<bool> stopping{false};
  std::mutex conn_mu;
  std::set<int> open_fds;
  std::vector<std::thread> connections;
};

Server::Server(std::string address, unsigned short port, SessionFactory factory)
    : address_(std::move(address)), port_(port), factory_(std::move(factory)),
      impl_(std::make_unique<Impl>()) {}

Server::~Server() { stop(); }

std::shared_ptr<Session> Server::session(const std::string& id) {
  std::lock_guard lock(sessions_mu_);
  auto& s = sessions_[id];
  if (!s) s = factory_();
  return s;
}

HttpResult Server::handle(const std::string& method, const std::string& target,
                          const std::string& body) {
  const Target t = parse_target(target);
  try {
    auto s = session(t.session);
    const auto& p = t.path;
    Json out;
    if (method == "GET" && p == "/health")
      out = {{"status", "ok"}};
    else if (method == "GET" && p == "/map")
      out = s->map_document();
    else if (method == "POST" && p == "/map")
      out = s->import_map(parse_body(body));
    else if (method == "GET" && p == "/grid")
      out = s->grid_document();
    else if (method == "POST" && p == "/capture")
      out = s->capture(parse_body(body));
    else if (method == "POST" && p == "/plan")
      out = s->plan(parse_body(body));
    else if (method == "POST" && p == "/path/register")
      out = s->register_candidate();
    else if (method == "POST" && p == "/mission/start")
      out = s->start_mission();
    else if (method == "POST" && p == "/mission/abort")
      out = s->abort_mission();
    else if (method == "GET" && p == "/mission")
      out = s->mission_status();
    else
      return {404, Json{{"error", "not_found"}, {"message", method + " " + p + " is not a route"}}.dump()};
    return {200, out.dump()};
  } catch (const Error& e) {
    return {http_status(e.kind()), error_body(e)};
  } catch (const std::exception& e) {
    return {500, Json{{"error", "internal"}, {"message", e.what()}}.dump()};
  }
}

void Server::start() {
  auto& im = *impl_;
  im.acceptor = std::make_unique<tcp::acceptor>(im.ioc);
  const tcp::endpoint ep(asio::ip::make_address(address_), port_);
  im.acceptor->open(ep.protocol());
  im.acceptor->set_option(asio::socket_base::reuse_address(true));
  im.acceptor->bind(ep);
  im.acceptor->listen();
  bound_port_ = im.acceptor->local_endpoint().port();

  im.accept_thread = std::thread([this] {
    auto& im = *impl_;
    while (!im.stopping) {
      tcp::socket socket(im.ioc);
      beast::error_code ec;
      im.acceptor->accept(socket, ec);
      if (ec) {
        if (im.stopping) return;
        continue;
      }
      std::lock_guard lock(im.conn_mu);
      const int fd = socket.native_handle();
      im.open_fds.insert(fd);
      im.connections.emplace_back([this, fd, sock = std::move(socket)]() mutable {
        auto& im = *impl_;
        try {
          beast::flat_buffer buffer;
          for (;;) {
            http::request<http::string_body> req;
            http::read(sock, buffer, req);
            const Target t = parse_target(std::string(req.target()));
            if (websocket::is_upgrade(req) && t.path == "/telemetry") {
              auto session = this->session(t.session);
              auto sub = session->hub().subscribe();
              websocket::stream<tcp::socket> ws(std::move(sock));
              ws.accept(req);
              ws.text(true);
              Json hello = session->mission_status();
              hello["type"] = "snapshot";
              ws.write(asio::buffer(hello.dump()));
              beast::flat_buffer inbound;
              while (!im.stopping) {
                // Client frames are ignored, but reading them lets the stream
                // answer pings and the closing handshake.
                if (ws.next_layer().available() > 0) {
                  beast::error_code rec;
                  ws.read(inbound, rec);
                  if (rec) break;
                  inbound.clear();
                }
                auto msg = sub->pop(std::chrono::milliseconds(50));
                if (msg) ws.write(asio::buffer(*msg));
              }
              sub->close();
              break;
            }
            const HttpResult r = handle(std::string(req.method_string()), std::string(req.target()), req.body());
            http::response<http::string_body> res{static_cast<http::status>(r.status), req.version()};
            res.set(http::field::content_type, "application/json");
            res.set(http::field::access_control_allow_origin, "*");
            res.keep_alive(req.keep_alive());
            res.body() = r.body;
            res.prepare_payload();
            http::write(sock, res);
            if (!res.keep_alive()) break;
          }
        } catch (const std::exception&) {
          // Peer closed or stream error: drop the connection.
        }
        std::lock_guard lock(im.conn_mu);
        im.open_fds.erase(fd);
      });
    }
  });
}

void Server::stop() {
  auto& im = *impl_;
  if (im.stopping.exchange(true)) return;
  if (im.acceptor) ::shutdown(im.acceptor->native_handle(), SHUT_RDWR);
  if (im.accept_thread.joinable()) im.accept_thread.join();
  std::vector<std::thread> conns;
  {
    std::lock_guard lock(im.conn_mu);
    for (int fd : im.open_fds) ::shutdown(fd, SHUT_RDWR);
    conns = std::move(im.connections);
  }
  for (auto& t : conns)
    if (t.joinable()) t.join();
  if (im.acceptor) {
    beast::error_code ec;
    im.acceptor->close(ec);
  }
}

}  // namespace agmap::service
