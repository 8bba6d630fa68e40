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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "optimus/behavior.hpp"
#include "optimus/device.hpp"
#include "optimus/events.hpp"
#include "optimus/graph.hpp"
#include "optimus/state.hpp"

namespace optimus {

/// check_state verdict. Pass requires all four conditions:
///   1. a check_data/calibrate pass within the timeout period,
///   2. no unresolved calibrate failure,
///   3. no dependency recalibrated since this node last passed,
///   4. every dependency passes check_state.
struct CheckStateResult {
  bool passed = false;
  int failed_condition = 0;  // 0 when passed
  NodeId culprit;            // condition 3/4: the dependency responsible
  std::string reason() const;
};

struct CalibrateResult {
  bool success = false;
  std::map<std::string, double> new_params;
};

struct MaintainAction {
  NodeId node;
  std::string action;  // check_state_pass | check_data | calibrate | diagnose
};

struct MaintainReport {
  NodeId target;
  std::vector<MaintainAction> visited;
  long experiments_run = 0;
  bool success = false;
};

/// The three interaction methods plus the two traversal algorithms over one
/// (graph, store, device) session. Emits every step into the event log.
/// One engine instance per session; no randomness of its own.
class Engine {
 public:
  Engine(const CalGraph& graph, StateStore& store, SimDevice& device,
         const BehaviorRegistry& registry, EventLog& log)
      : graph_(graph), store_(store), device_(device), registry_(registry),
        log_(log) {}

  /// Acquires no data (the experiment counter is untouched). Evaluates the
  /// four conditions with per-query memoization of the recursion.
  CheckStateResult check_state(const NodeId& id);

  /// Runs the node's small check scan and classifies it three ways,
  /// recording the outcome in the store. A node whose own target parameters
  /// have never been determined is out of spec by definition and is
  /// classified without taking data.
  CheckDataOutcome check_data(const NodeId& id);

  /// Runs the full calibration scan, analyzes it, and on success stores the
  /// proposed parameters (the only operation that writes parameters).
  /// Throws BadDataInCalibrateError when the scan is off-family: check_data
  /// gates calibrate, so bad data here is a protocol violation.
  CalibrateResult calibrate(const NodeId& id);

  /// Brings `id` (and, recursively, its ancestors) in spec with minimal
  /// data: nodes passing check_state are skipped entirely; a node whose
  /// conditions recover after its dependencies are repaired is also
  /// skipped; otherwise check_data decides between done / calibrate /
  /// diagnose-then-calibrate. A calibrate failure aborts the run with the
  /// node marked FailedUnresolved.
  MaintainReport maintain(const NodeId& id);

  /// Data-only recovery for a node whose check scan returned bad data:
  /// examines dependencies with check_data (never check_state), calibrates
  /// the out-of-spec ones, and recurses on bad data. Throws DiagnoseError
  /// if nothing needed recalibration.
  std::vector<NodeId> diagnose(const NodeId& id);

  /// Scans executed so far (request + data), in execution order.
  const std::vector<std::pair<ScanRequest, ScanData>>& executed_scans() const {
    return scans_;
  }

 private:
  CheckStateResult check_state_impl(const NodeId& id,
                                    std::map<NodeId, CheckStateResult>& memo);
  void maintain_step(const NodeId& id, MaintainReport& report);
  /// calibrate() + event bookkeeping; throws CalibrateFailedError on failure.
  void calibrate_or_abort(const NodeId& id, MaintainReport* report);
  std::map<NodeId, long> dependency_versions(const NodeId& id) const;
  const NodeBehavior& behavior_of(const NodeId& id) const;
  ScanData run_scan(const ScanRequest& request);

  const CalGraph& graph_;
  StateStore& store_;
  SimDevice& device_;
  const BehaviorRegistry& registry_;
  EventLog& log_;
  std::vector<std::pair<ScanRequest, ScanData>> scans_;
};

}  // namespace optimus
