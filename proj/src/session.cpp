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

#include "optimus/session.hpp"

#include <cstdio>
#include <fstream>

#include "optimus/errors.hpp"

namespace optimus {

Session::Session(CalGraph graph, const DeviceSetup& setup,
                 BehaviorRegistry registry, std::optional<StateStore> resumed)
    : graph_(std::move(graph)),
      registry_(std::move(registry)),
      store_(resumed ? std::move(*resumed) : StateStore(graph_)),
      device_(setup.make_device()) {
  engine_ = std::make_unique<Engine>(graph_, store_, device_, registry_, log_);
  for (const FaultSpec& f : setup.faults) inject_fault(f);
}

void Session::inject_fault(const FaultSpec& fault) {
  if (fault.kind == "flatline_readout") {
    device_.set_flatline_readout(true);
    return;
  }
  if (fault.kind == "corrupt_param") {
    const auto current = store_.params().get(fault.node, fault.param);
    if (!current)
      throw UnknownTargetError(fault.node + "/" + fault.param);
    // An unaudited external write: the value changes and the version
    // counters tick, but no record of a pass or calibration exists.
    store_.write_param(fault.node, fault.param, *current * fault.factor,
                       device_.now(), /*bump_cal_version=*/true);
    return;
  }
  throw UnknownTargetError(fault.kind);
}

SessionMaintainResult Session::maintain(const NodeId& target) {
  const std::size_t ev0 = log_.size();
  const long ex0 = device_.experiment_count();
  last_check_datas_.clear();
  last_calibrates_.clear();
  last_error_.clear();

  SessionMaintainResult result;
  try {
    result.report = engine_->maintain(target);
    if (!result.report.success) {
      result.error_kind = "calibrate_failed";
      last_error_ = result.error_kind;
    }
  } catch (const DiagnoseError& e) {
    result.report.target = target;
    result.error_kind = "diagnose_error";
    result.error_message = e.what();
    result.diagnose_checked = e.checked_dependencies();
    last_error_ = result.error_kind;
  } catch (const BadDataInCalibrateError& e) {
    result.report.target = target;
    result.error_kind = "bad_data_in_calibrate";
    result.error_message = e.what();
    last_error_ = result.error_kind;
  }

  last_experiments_ = device_.experiment_count() - ex0;
  for (std::size_t i = ev0; i < log_.size(); ++i) {
    const Event& e = log_.events()[i];
    if (e.event == "check_data") ++last_check_datas_[e.node];
    if (e.event == "calibrate") ++last_calibrates_[e.node];
  }
  return result;
}

long Session::last_check_datas(const NodeId& id) const {
  if (!id.empty()) {
    auto it = last_check_datas_.find(id);
    return it == last_check_datas_.end() ? 0 : it->second;
  }
  long total = 0;
  for (const auto& [node, n] : last_check_datas_) total += n;
  return total;
}

long Session::last_calibrates(const NodeId& id) const {
  if (!id.empty()) {
    auto it = last_calibrates_.find(id);
    return it == last_calibrates_.end() ? 0 : it->second;
  }
  long total = 0;
  for (const auto& [node, n] : last_calibrates_) total += n;
  return total;
}

void Session::write_outputs(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir / "scans");
  {
    std::ofstream out(dir / "events.jsonl");
    log_.write_jsonl(out);
  }
  {
    std::ofstream out(dir / "state.jsonl");
    store_.persist(out);
  }
  int index = 0;
  for (const auto& [request, data] : engine_->executed_scans()) {
    char name[64];
    std::snprintf(name, sizeof(name), "scan_%03d_%s.txt", index++,
                  request.node.c_str());
    std::ofstream out(dir / "scans" / name);
    for (std::size_t i = 0; i < data.abscissa.size(); ++i) {
      char line[80];
      std::snprintf(line, sizeof(line), "%.9g %.9g\n", data.abscissa[i],
                    data.measured[i]);
      out << line;
    }
  }
}

}  // namespace optimus
