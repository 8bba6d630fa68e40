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
#include <unordered_map>
#include <vector>

namespace optimus {

/// Node ids are strings, by convention "<cal_name>.<qubit_label>" for
/// per-qubit cals (e.g. "rabi_fine.q0").
using NodeId = std::string;

/// One sweep: which knob is varied, the abscissa values, and how many shots
/// are taken per point. The unit and reference frame of `points` (absolute
/// vs. relative to a stored parameter) is defined by the node behavior.
struct ScanTemplate {
  std::string swept_parameter;
  std::vector<double> points;
  int shots_per_point = 0;

  bool valid() const;
};

/// Static definition of one calibration: what it targets, what it needs,
/// how it measures, and how long a pass stays trustworthy.
struct NodeSpec {
  NodeId id;
  std::vector<NodeId> dependencies;
  std::vector<std::string> parameters;   // parameter names this cal targets
  double timeout_s = 0.0;                // virtual seconds
  std::map<std::string, double> tolerance;  // figure of merit -> threshold
  std::string behavior;                  // registered behavior name
  ScanTemplate check_data_scan;          // small point count
  ScanTemplate calibrate_scan;           // large point count
  std::map<std::string, double> initial_guesses;  // optional, see config
};

/// Immutable calibration graph. Edges point from a node to its
/// dependencies; the reverse adjacency (dependents) is cached at build time.
/// All iteration orders derive from declaration order, so every traversal
/// is reproducible.
class CalGraph {
 public:
  bool contains(const NodeId& id) const { return index_.count(id) != 0; }
  const NodeSpec& node(const NodeId& id) const;
  const std::vector<NodeId>& declaration_order() const { return order_; }
  const std::vector<NodeId>& dependents(const NodeId& id) const;
  std::size_t size() const { return order_.size(); }

  /// Dependency closure of `id` (excluding `id`) in topological order,
  /// dependencies before dependents, ties broken by declaration order.
  std::vector<NodeId> ancestors(const NodeId& id) const;

  /// Kahn topological order over the whole graph with declaration-order
  /// tie-breaking. Every node appears after all of its dependencies.
  std::vector<NodeId> topological_order() const;

  friend CalGraph build_graph(const std::vector<NodeSpec>& specs);

 private:
  std::vector<NodeId> order_;
  std::unordered_map<NodeId, NodeSpec> nodes_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::unordered_map<NodeId, std::vector<NodeId>> dependents_;
};

/// Validates and freezes a graph. Throws DuplicateNodeError,
/// UnknownDependencyError or CycleDetectedError.
CalGraph build_graph(const std::vector<NodeSpec>& specs);

}  // namespace optimus
