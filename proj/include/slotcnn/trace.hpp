// Copyright 2026 The slotcnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Execution tracing. A TraceRecorder attached to a SlotContext observes every
// rotation index and every level-consuming operation flowing through the
// backend, plus free-form markers that callers use to attribute events to
// layers. The rotation-key planner validates its predictions against these
// traces.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace slotcnn {

struct TraceEvent {
  enum class Kind {
    rotation,
    mult_plain,
    mult_cipher,
    bootstrap,
    marker,
  };

  Kind kind;
  long rotation_index = 0;  // rotation events only
  int level_after = -1;     // mult/bootstrap events only
  std::string label;        // marker events only
};

class TraceRecorder {
 public:
  void record_rotation(long index) {
    std::lock_guard<std::mutex> lock(mu_);
    events_.push_back({TraceEvent::Kind::rotation, index, -1, {}});
  }
  void record_mult_plain(int level_after) {
    std::lock_guard<std::mutex> lock(mu_);
    events_.push_back({TraceEvent::Kind::mult_plain, 0, level_after, {}});
  }
  void record_mult_cipher(int level_after) {
    std::lock_guard<std::mutex> lock(mu_);
    events_.push_back({TraceEvent::Kind::mult_cipher, 0, level_after, {}});
  }
  void record_bootstrap(int level_after) {
    std::lock_guard<std::mutex> lock(mu_);
    events_.push_back({TraceEvent::Kind::bootstrap, 0, level_after, {}});
  }
  void mark(std::string label) {
    std::lock_guard<std::mutex> lock(mu_);
    events_.push_back({TraceEvent::Kind::marker, 0, -1, std::move(label)});
  }

  std::vector<TraceEvent> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return events_;
  }

  /// Rotation indices in execution order.
  std::vector<long> rotation_indices() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<long> out;
    out.reserve(events_.size());
    for (const TraceEvent& e : events_) {
      if (e.kind == TraceEvent::Kind::rotation) {
        out.push_back(e.rotation_index);
      }
    }
    return out;
  }

  /// Distinct rotation index -> number of uses.
  std::map<long, long> rotation_usage() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::map<long, long> out;
    for (const TraceEvent& e : events_) {
      if (e.kind == TraceEvent::Kind::rotation) {
        ++out[e.rotation_index];
      }
    }
    return out;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return events_.size();
  }

  void clear() {
    std::lock_guard<std::mutex> lock(mu_);
    events_.clear();
  }

 private:
  mutable std::mutex mu_;
  std::vector<TraceEvent> events_;
};

}  // namespace slotcnn
