// Copyright 2026 The Optimus Authors.
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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "optimus/config.hpp"
#include "optimus/engine.hpp"

namespace optimus {

/// Outcome of one maintain run at the session level: engine errors are
/// captured rather than thrown so scripted scenarios can assert on them.
struct SessionMaintainResult {
  MaintainReport report;
  std::string error_kind;  // "" | diagnose_error | bad_data_in_calibrate |
                           // calibrate_failed
  std::string error_message;
  std::vector<NodeId> diagnose_checked;  // DiagnoseError payload
};

/// One thread of control owning graph + store + device + engine + log.
class Session {
 public:
  Session(CalGraph graph, const DeviceSetup& setup, BehaviorRegistry registry,
          std::optional<StateStore> resumed_state = std::nullopt);

  const CalGraph& graph() const { return graph_; }
  StateStore& store() { return store_; }
  const StateStore& store() const { return store_; }
  SimDevice& device() { return device_; }
  const SimDevice& device() const { return device_; }
  Engine& engine() { return *engine_; }
  EventLog& log() { return log_; }

  SessionMaintainResult maintain(const NodeId& target);

  void advance(double seconds) { device_.advance_and_drift(seconds); }
  void jump(const std::string& param, double delta) {
    device_.apply_param_delta(param, delta);
  }
  void inject_fault(const FaultSpec& fault);

  /// Counters for the most recent maintain run.
  long last_experiments() const { return last_experiments_; }
  long last_check_datas(const NodeId& id = "") const;
  long last_calibrates(const NodeId& id = "") const;
  const std::string& last_error() const { return last_error_; }

  /// Writes events.jsonl, state.jsonl and per-scan data files under `dir`.
  void write_outputs(const std::filesystem::path& dir) const;

 private:
  CalGraph graph_;
  BehaviorRegistry registry_;
  StateStore store_;
  SimDevice device_;
  EventLog log_;
  std::unique_ptr<Engine> engine_;

  long last_experiments_ = 0;
  std::map<NodeId, long> last_check_datas_;
  std::map<NodeId, long> last_calibrates_;
  std::string last_error_;
};

}  // namespace optimus
