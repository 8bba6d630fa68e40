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

#include "optimus/state.hpp"

#include <istream>
#include <ostream>

#include "json.hpp"
#include "optimus/errors.hpp"

namespace optimus {

using ordered_json = nlohmann::ordered_json;

const char* to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::InSpec: return "in_spec";
    case NodeStatus::OutOfSpec: return "out_of_spec";
    case NodeStatus::Unknown: return "unknown";
    case NodeStatus::FailedUnresolved: return "failed_unresolved";
  }
  return "unknown";
}

NodeStatus node_status_from_string(const std::string& s) {
  if (s == "in_spec") return NodeStatus::InSpec;
  if (s == "out_of_spec") return NodeStatus::OutOfSpec;
  if (s == "unknown") return NodeStatus::Unknown;
  if (s == "failed_unresolved") return NodeStatus::FailedUnresolved;
  throw Error("bad node status: " + s);
}

std::optional<double> ParamStore::get(const NodeId& node,
                                      const std::string& name) const {
  auto it = entries_.find({node, name});
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

const ParamEntry* ParamStore::entry(const NodeId& node,
                                    const std::string& name) const {
  auto it = entries_.find({node, name});
  return it == entries_.end() ? nullptr : &it->second;
}

void ParamStore::set(const NodeId& node, const std::string& name, double value,
                     double time) {
  auto& e = entries_[{node, name}];
  e.value = value;
  e.version += 1;
  e.time = time;
}

void ParamStore::set_raw(const NodeId& node, const std::string& name,
                         ParamEntry entry) {
  entries_[{node, name}] = entry;
}

StateStore::StateStore(const CalGraph& graph) {
  for (const auto& id : graph.declaration_order()) {
    records_[id] = NodeRecord{};
    for (const auto& [name, value] : graph.node(id).initial_guesses)
      params_.set(id, name, value, 0.0);
  }
}

const NodeRecord& StateStore::record(const NodeId& id) const {
  auto it = records_.find(id);
  if (it == records_.end()) throw UnknownNodeError(id);
  return it->second;
}

NodeRecord& StateStore::mutable_record(const NodeId& id) {
  auto it = records_.find(id);
  if (it == records_.end()) throw UnknownNodeError(id);
  return it->second;
}

void StateStore::record_pass(const NodeId& id, double time,
                             const std::map<std::string, double>& foms,
                             const std::map<NodeId, long>& dep_versions) {
  NodeRecord& rec = mutable_record(id);
  if (rec.status == NodeStatus::FailedUnresolved)
    throw IllegalTransitionError(
        id, "check_data pass cannot clear an unresolved calibrate failure");
  rec.status = NodeStatus::InSpec;
  rec.last_pass_time = time;
  rec.dep_versions_at_last_pass = dep_versions;
  rec.last_figures_of_merit = foms;
}

void StateStore::record_calibration(
    const NodeId& id, double time,
    const std::map<std::string, double>& new_params,
    const std::map<std::string, double>& foms,
    const std::map<NodeId, long>& dep_versions) {
  NodeRecord& rec = mutable_record(id);
  for (const auto& [name, value] : new_params) params_.set(id, name, value, time);
  rec.cal_version += 1;
  rec.status = NodeStatus::InSpec;  // also clears FailedUnresolved
  rec.last_pass_time = time;
  rec.dep_versions_at_last_pass = dep_versions;
  rec.last_figures_of_merit = foms;
}

void StateStore::record_failure(const NodeId& id, double time, FailureKind kind,
                                const std::map<std::string, double>& foms) {
  NodeRecord& rec = mutable_record(id);
  (void)time;
  if (kind == FailureKind::CalibrateFailed) {
    rec.status = NodeStatus::FailedUnresolved;
  } else {
    // BadDataObserved marks the node out of spec without touching the
    // calibrate-failure flag.
    if (rec.status != NodeStatus::FailedUnresolved)
      rec.status = NodeStatus::OutOfSpec;
  }
  if (!foms.empty()) rec.last_figures_of_merit = foms;
}

void StateStore::write_param(const NodeId& id, const std::string& name,
                             double value, double time, bool bump_cal_version) {
  if (!records_.count(id)) throw UnknownNodeError(id);
  params_.set(id, name, value, time);
  if (bump_cal_version) mutable_record(id).cal_version += 1;
}

void StateStore::persist(std::ostream& out) const {
  out << R"({"format":"optimus-state","version":1})" << "\n";
  for (const auto& [id, rec] : records_) {
    ordered_json j;
    j["id"] = id;
    j["status"] = to_string(rec.status);
    if (rec.last_pass_time)
      j["last_pass_time"] = *rec.last_pass_time;
    else
      j["last_pass_time"] = nullptr;
    j["cal_version"] = rec.cal_version;
    j["dep_versions"] = ordered_json::object();
    for (const auto& [dep, v] : rec.dep_versions_at_last_pass)
      j["dep_versions"][dep] = v;
    j["foms"] = ordered_json::object();
    for (const auto& [name, v] : rec.last_figures_of_merit) j["foms"][name] = v;
    out << j.dump() << "\n";
  }
  for (const auto& [key, e] : params_.entries()) {
    ordered_json j;
    j["node"] = key.first;
    j["param"] = key.second;
    j["value"] = e.value;
    j["version"] = e.version;
    j["time"] = e.time;
    out << j.dump() << "\n";
  }
}

StateStore StateStore::restore(std::istream& in) {
  StateStore store;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw CorruptSnapshotError(lineno, e.what());
    }
    try {
      if (lineno == 1) {
        if (j.value("format", "") != "optimus-state" || j.value("version", 0) != 1)
          throw CorruptSnapshotError(lineno, "bad header");
        continue;
      }
      if (j.contains("id")) {
        NodeRecord rec;
        rec.status = node_status_from_string(j.at("status").get<std::string>());
        if (!j.at("last_pass_time").is_null())
          rec.last_pass_time = j.at("last_pass_time").get<double>();
        rec.cal_version = j.at("cal_version").get<long>();
        for (const auto& [dep, v] : j.at("dep_versions").items())
          rec.dep_versions_at_last_pass[dep] = v.get<long>();
        for (const auto& [name, v] : j.at("foms").items())
          rec.last_figures_of_merit[name] = v.get<double>();
        store.records_[j.at("id").get<std::string>()] = rec;
      } else if (j.contains("node")) {
        ParamEntry e;
        e.value = j.at("value").get<double>();
        e.version = j.at("version").get<long>();
        e.time = j.at("time").get<double>();
        store.params_.set_raw(j.at("node").get<std::string>(),
                              j.at("param").get<std::string>(), e);
      } else {
        throw CorruptSnapshotError(lineno, "unrecognized record");
      }
    } catch (const nlohmann::json::exception& e) {
      throw CorruptSnapshotError(lineno, e.what());
    } catch (const Error& e) {
      throw CorruptSnapshotError(lineno, e.what());
    }
  }
  if (lineno == 0) throw CorruptSnapshotError(0, "empty snapshot");
  return store;
}

}  // namespace optimus
