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

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "optimus/graph.hpp"

namespace optimus {

/// Dynamic knowledge about one cal. Unknown is treated as out of spec by
/// every query; FailedUnresolved is set only by a failed calibrate and
/// cleared only by a later successful calibrate on the same node.
enum class NodeStatus { InSpec, OutOfSpec, Unknown, FailedUnresolved };

const char* to_string(NodeStatus s);
NodeStatus node_status_from_string(const std::string& s);

enum class FailureKind { CalibrateFailed, BadDataObserved };

struct NodeRecord {
  NodeStatus status = NodeStatus::Unknown;
  std::optional<double> last_pass_time;   // virtual seconds
  long cal_version = 0;                   // bumped by successful calibrate
  std::map<NodeId, long> dep_versions_at_last_pass;
  std::map<std::string, double> last_figures_of_merit;

  bool operator==(const NodeRecord&) const = default;
};

struct ParamEntry {
  double value = 0.0;
  long version = 0;
  double time = 0.0;

  bool operator==(const ParamEntry&) const = default;
};

/// Calibrated parameter values, keyed by (owning node, parameter name).
class ParamStore {
 public:
  std::optional<double> get(const NodeId& node, const std::string& name) const;
  const ParamEntry* entry(const NodeId& node, const std::string& name) const;
  /// Writes a value, bumping the per-entry version.
  void set(const NodeId& node, const std::string& name, double value,
           double time);
  /// Restores an entry verbatim (snapshot loading).
  void set_raw(const NodeId& node, const std::string& name, ParamEntry entry);
  const std::map<std::pair<NodeId, std::string>, ParamEntry>& entries() const {
    return entries_;
  }

  bool operator==(const ParamStore&) const = default;

 private:
  std::map<std::pair<NodeId, std::string>, ParamEntry> entries_;
};

/// All dynamic knowledge of the system: per-node records plus the parameter
/// table. Single writer; plain value semantics.
class StateStore {
 public:
  StateStore() = default;

  /// Registers every graph node with an Unknown record and loads initial
  /// parameter guesses (which do not bump cal_version).
  explicit StateStore(const CalGraph& graph);

  bool knows(const NodeId& id) const { return records_.count(id) != 0; }
  const NodeRecord& record(const NodeId& id) const;
  const ParamStore& params() const { return params_; }
  long cal_version(const NodeId& id) const { return record(id).cal_version; }

  /// A passing check_data or calibrate: status InSpec, timestamps and the
  /// dependency-version snapshot refreshed. Throws IllegalTransitionError
  /// if the node is FailedUnresolved (a check_data pass cannot clear a
  /// calibrate failure).
  void record_pass(const NodeId& id, double time,
                   const std::map<std::string, double>& foms,
                   const std::map<NodeId, long>& dep_versions);

  /// A successful calibrate: parameters written, cal_version bumped, then
  /// pass semantics applied; FailedUnresolved cleared.
  void record_calibration(const NodeId& id, double time,
                          const std::map<std::string, double>& new_params,
                          const std::map<std::string, double>& foms,
                          const std::map<NodeId, long>& dep_versions);

  void record_failure(const NodeId& id, double time, FailureKind kind,
                      const std::map<std::string, double>& foms = {});

  /// Writes a single parameter without pass semantics. Initial config
  /// guesses use bump_cal_version = false; fault injection uses true so the
  /// unaudited write is visible to dependency-version snapshots.
  void write_param(const NodeId& id, const std::string& name, double value,
                   double time, bool bump_cal_version);

  /// JSON Lines snapshot, fixed key order, byte-stable.
  void persist(std::ostream& out) const;
  static StateStore restore(std::istream& in);

  const std::map<NodeId, NodeRecord>& records() const { return records_; }

  bool operator==(const StateStore&) const = default;

 private:
  NodeRecord& mutable_record(const NodeId& id);
  std::map<NodeId, NodeRecord> records_;
  ParamStore params_;
};

}  // namespace optimus
