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

#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace agmap::service {

/// One consumer's ordered message queue.
class Subscriber {
 public:
  void push(std::string msg) {
    {
      std::lock_guard lock(mu_);
      if (closed_) return;
      queue_.push_back(std::move(msg));
    }
    cv_.notify_one();
  }

  /// Next message, or nothing after `timeout` / once closed and drained.
  std::optional<std::string> pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return std::nullopt;
    std::string msg = std::move(queue_.front());
    queue_.pop_front();
    return msg;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> queue_;
  bool closed_ = false;
};

/// Fans published messages out to every live subscriber, preserving order.
class TelemetryHub {
 public:
  std::shared_ptr<Subscriber> subscribe() {
    auto s = std::make_shared<Subscriber>();
    std::lock_guard lock(mu_);
    subs_.push_back(s);
    return s;
  }

  void publish(const std::string& msg) {
    std::lock_guard lock(mu_);
    std::erase_if(subs_, [](const std::weak_ptr<Subscriber>& w) {
      auto s = w.lock();
      return !s || s->closed();
    });
    for (auto& w : subs_)
      if (auto s = w.lock()) s->push(msg);
  }

  size_t subscriber_count() {
    std::lock_guard lock(mu_);
    std::erase_if(subs_, [](const std::weak_ptr<Subscriber>& w) { return w.expired(); });
    return subs_.size();
  }

 private:
  std::mutex mu_;
  std::vector<std::weak_ptr<Subscriber>> subs_;
};

}  // namespace agmap::service
