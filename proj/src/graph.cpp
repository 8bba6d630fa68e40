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

#include "optimus/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "optimus/errors.hpp"

namespace optimus {

bool ScanTemplate::valid() const {
  if (points.empty() || shots_per_point <= 0) return false;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i] <= points[i - 1]) return false;  // strictly monotonic
  return true;
}

const NodeSpec& CalGraph::node(const NodeId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNodeError(id);
  return it->second;
}

const std::vector<NodeId>& CalGraph::dependents(const NodeId& id) const {
  auto it = dependents_.find(id);
  if (it == dependents_.end()) throw UnknownNodeError(id);
  return it->second;
}

namespace {

// DFS cycle search. Returns the nodes forming one cycle, in declaration
// order, so diagnostics are stable.
std::vector<NodeId> find_cycle(const std::vector<NodeId>& order,
                               const std::unordered_map<NodeId, NodeSpec>& nodes) {
  enum class Mark { White, Grey, Black };
  std::unordered_map<NodeId, Mark> mark;
  for (const auto& id : order) mark[id] = Mark::White;

  std::vector<NodeId> stack;
  std::vector<NodeId> cycle;

  // Iterative DFS with an explicit path so we can cut the cycle out of it.
  struct Frame {
    NodeId id;
    std::size_t next_dep = 0;
  };
  for (const auto& root : order) {
    if (mark[root] != Mark::White) continue;
    std::vector<Frame> frames{{root}};
    mark[root] = Mark::Grey;
    stack.push_back(root);
    while (!frames.empty()) {
      Frame& f = frames.back();
      const auto& deps = nodes.at(f.id).dependencies;
      if (f.next_dep < deps.size()) {
        const NodeId& dep = deps[f.next_dep++];
        if (mark[dep] == Mark::Grey) {
          auto it = std::find(stack.begin(), stack.end(), dep);
          cycle.assign(it, stack.end());
          std::sort(cycle.begin(), cycle.end(), [&](const NodeId& a, const NodeId& b) {
            return std::find(order.begin(), order.end(), a) <
                   std::find(order.begin(), order.end(), b);
          });
          return cycle;
        }
        if (mark[dep] == Mark::White) {
          mark[dep] = Mark::Grey;
          stack.push_back(dep);
          frames.push_back({dep});
        }
      } else {
        mark[f.id] = Mark::Black;
        stack.pop_back();
        frames.pop_back();
      }
    }
  }
  return {};
}

}  // namespace

CalGraph build_graph(const std::vector<NodeSpec>& specs) {
  CalGraph g;
  for (const auto& spec : specs) {
    if (spec.id.empty()) throw ConfigError("empty node id");
    if (g.nodes_.count(spec.id)) throw DuplicateNodeError(spec.id);
    std::set<NodeId> seen;
    for (const auto& dep : spec.dependencies) {
      if (dep == spec.id) throw CycleDetectedError({spec.id});
      if (!seen.insert(dep).second)
        throw ConfigError("node '" + spec.id + "' lists dependency '" + dep +
                          "' twice");
    }
    if (spec.timeout_s <= 0.0)
      throw ConfigError("node '" + spec.id + "' needs timeout_s > 0");
    if (!spec.check_data_scan.valid() || !spec.calibrate_scan.valid())
      throw ConfigError("node '" + spec.id +
                        "' needs non-empty strictly monotonic scans");
    if (spec.check_data_scan.points.size() > spec.calibrate_scan.points.size())
      throw ConfigError("node '" + spec.id +
                        "' check_data scan larger than calibrate scan");
    g.index_[spec.id] = g.order_.size();
    g.order_.push_back(spec.id);
    g.nodes_[spec.id] = spec;
  }

  for (const auto& id : g.order_) {
    for (const auto& dep : g.nodes_[id].dependencies)
      if (!g.nodes_.count(dep)) throw UnknownDependencyError(id, dep);
  }

  auto cycle = find_cycle(g.order_, g.nodes_);
  if (!cycle.empty()) throw CycleDetectedError(cycle);

  for (const auto& id : g.order_) g.dependents_[id] = {};
  for (const auto& id : g.order_)
    for (const auto& dep : g.nodes_[id].dependencies)
      g.dependents_[dep].push_back(id);

  return g;
}

std::vector<NodeId> CalGraph::ancestors(const NodeId& id) const {
  if (!contains(id)) throw UnknownNodeError(id);
  // Collect the closure, then order it like topological_order() restricted
  // to the closure.
  std::set<NodeId> closure;
  std::deque<NodeId> frontier{id};
  while (!frontier.empty()) {
    NodeId cur = frontier.front();
    frontier.pop_front();
    for (const auto& dep : nodes_.at(cur).dependencies)
      if (closure.insert(dep).second) frontier.push_back(dep);
  }
  std::vector<NodeId> result;
  for (const auto& n : topological_order())
    if (closure.count(n)) result.push_back(n);
  return result;
}

std::vector<NodeId> CalGraph::topological_order() const {
  std::unordered_map<NodeId, std::size_t> remaining;
  for (const auto& id : order_) remaining[id] = nodes_.at(id).dependencies.size();
  std::vector<NodeId> out;
  out.reserve(order_.size());
  std::vector<bool> emitted(order_.size(), false);
  // Kahn's algorithm; the ready set is scanned in declaration order each
  // round, which is O(n^2) but n is tens of nodes.
  while (out.size() < order_.size()) {
    bool progressed = false;
    for (std::size_t i = 0; i < order_.size(); ++i) {
      if (emitted[i] || remaining[order_[i]] != 0) continue;
      emitted[i] = true;
      out.push_back(order_[i]);
      for (const auto& dependent : dependents_.at(order_[i])) --remaining[dependent];
      progressed = true;
      break;  // restart scan so ties always resolve by declaration order
    }
    if (!progressed) break;  // unreachable: acyclicity checked at build
  }
  return out;
}

}  // namespace optimus
