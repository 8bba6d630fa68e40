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

#include "optimus/engine.hpp"

#include <cstdio>

#include "optimus/errors.hpp"

namespace optimus {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fom_detail(const std::map<std::string, double>& foms) {
  std::string out;
  for (const auto& [k, v] : foms) {
    if (!out.empty()) out += ";";
    out += k + "=" + fmt_g(v);
  }
  return out;
}

std::string join(const std::vector<NodeId>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ",";
    out += id;
  }
  return out;
}

}  // namespace

std::string CheckStateResult::reason() const {
  if (passed) return "";
  std::string r = "condition_" + std::to_string(failed_condition);
  if (!culprit.empty()) r += ":" + culprit;
  return r;
}

const NodeBehavior& Engine::behavior_of(const NodeId& id) const {
  const NodeSpec& spec = graph_.node(id);
  auto it = registry_.find(spec.behavior);
  if (it == registry_.end())
    throw ConfigError("node '" + id + "' uses unregistered behavior '" +
                      spec.behavior + "'");
  return *it->second;
}

std::map<NodeId, long> Engine::dependency_versions(const NodeId& id) const {
  std::map<NodeId, long> versions;
  for (const NodeId& dep : graph_.node(id).dependencies)
    versions[dep] = store_.cal_version(dep);
  return versions;
}

ScanData Engine::run_scan(const ScanRequest& request) {
  ScanData data = device_.execute_scan(request);
  scans_.emplace_back(request, data);
  return data;
}

CheckStateResult Engine::check_state(const NodeId& id) {
  std::map<NodeId, CheckStateResult> memo;
  const CheckStateResult res = check_state_impl(id, memo);
  log_.emit({device_.now(), "check_state", id, res.passed ? "pass" : "fail",
             res.reason()});
  return res;
}

CheckStateResult Engine::check_state_impl(
    const NodeId& id, std::map<NodeId, CheckStateResult>& memo) {
  auto hit = memo.find(id);
  if (hit != memo.end()) return hit->second;

  const NodeSpec& spec = graph_.node(id);
  const NodeRecord& rec = store_.record(id);
  CheckStateResult res;
  const double now = device_.now();

  // Condition 1: a pass within the timeout period. Strict comparison, so a
  // node exactly at its timeout is already stale.
  if (!rec.last_pass_time || !(now - *rec.last_pass_time < spec.timeout_s)) {
    res.failed_condition = 1;
  } else if (rec.status == NodeStatus::FailedUnresolved) {
    res.failed_condition = 2;
  } else {
    res.passed = true;
    for (const NodeId& dep : spec.dependencies) {
      auto snap = rec.dep_versions_at_last_pass.find(dep);
      if (snap == rec.dep_versions_at_last_pass.end() ||
          snap->second != store_.cal_version(dep)) {
        res.passed = false;
        res.failed_condition = 3;
        res.culprit = dep;
        break;
      }
    }
    if (res.passed) {
      for (const NodeId& dep : spec.dependencies) {
        if (!check_state_impl(dep, memo).passed) {
          res.passed = false;
          res.failed_condition = 4;
          res.culprit = dep;
          break;
        }
      }
    }
  }
  memo[id] = res;
  return res;
}

CheckDataOutcome Engine::check_data(const NodeId& id) {
  const NodeSpec& spec = graph_.node(id);
  const NodeBehavior& behavior = behavior_of(id);
  BehaviorContext ctx{spec, ParamResolver(graph_, store_, id)};

  CheckDataOutcome outcome;
  if (!behavior.ready_to_check(ctx)) {
    // Nothing has ever determined this cal's parameters, so there is no
    // expectation to measure against: out of spec by definition, no data.
    outcome.classification = CheckClass::OutOfSpec;
    outcome.detail = "uncalibrated";
  } else {
    const ScanRequest request = behavior.build_scan(ScanKind::CheckData, ctx);
    const ScanData data = run_scan(request);
    outcome = behavior.analyze_check(ctx, request, data);
  }

  const double now = device_.now();
  if (outcome.classification == CheckClass::InSpec) {
    // A pass cannot clear an unresolved calibrate failure; the caller will
    // see the flag and calibrate anyway.
    if (store_.record(id).status != NodeStatus::FailedUnresolved)
      store_.record_pass(id, now, outcome.figures_of_merit,
                         dependency_versions(id));
  } else {
    store_.record_failure(id, now, FailureKind::BadDataObserved,
                          outcome.figures_of_merit);
  }
  log_.emit({now, "check_data", id, to_string(outcome.classification),
             outcome.detail});
  return outcome;
}

CalibrateResult Engine::calibrate(const NodeId& id) {
  const NodeSpec& spec = graph_.node(id);
  const NodeBehavior& behavior = behavior_of(id);
  BehaviorContext ctx{spec, ParamResolver(graph_, store_, id)};

  const ScanRequest request = behavior.build_scan(ScanKind::Calibrate, ctx);
  const ScanData data = run_scan(request);
  const CalibrationAnalysis analysis = behavior.analyze_calibrate(ctx, request, data);
  const double now = device_.now();

  CalibrateResult result;
  switch (analysis.verdict) {
    case CalVerdict::Success:
      store_.record_calibration(id, now, analysis.params,
                                analysis.figures_of_merit,
                                dependency_versions(id));
      log_.emit({now, "calibrate", id, "success",
                 fom_detail(analysis.figures_of_merit)});
      for (const auto& [name, value] : analysis.params)
        log_.emit({now, "param_update", id, "ok", name + "=" + fmt_g(value)});
      result.success = true;
      result.new_params = analysis.params;
      break;
    case CalVerdict::OutOfTolerance:
      store_.record_failure(id, now, FailureKind::CalibrateFailed,
                            analysis.figures_of_merit);
      log_.emit({now, "calibrate", id, "failed", analysis.detail});
      break;
    case CalVerdict::BadData:
      log_.emit({now, "calibrate", id, "bad_data", analysis.detail});
      log_.emit({now, "error", id, "bad_data_in_calibrate", analysis.detail});
      throw BadDataInCalibrateError(id);
  }
  return result;
}

void Engine::calibrate_or_abort(const NodeId& id, MaintainReport* report) {
  const CalibrateResult r = calibrate(id);
  if (report) report->visited.push_back({id, "calibrate"});
  if (!r.success) throw CalibrateFailedError(id);
}

MaintainReport Engine::maintain(const NodeId& id) {
  if (!graph_.contains(id)) throw UnknownNodeError(id);
  MaintainReport report;
  report.target = id;
  const long start = device_.experiment_count();
  try {
    maintain_step(id, report);
    report.success = true;
  } catch (const CalibrateFailedError&) {
    report.success = false;
  }
  report.experiments_run = device_.experiment_count() - start;
  return report;
}

void Engine::maintain_step(const NodeId& id, MaintainReport& report) {
  if (check_state(id).passed) {
    report.visited.push_back({id, "check_state_pass"});
    return;
  }

  const NodeSpec& spec = graph_.node(id);
  for (const NodeId& dep : spec.dependencies) maintain_step(dep, report);

  // Repairing dependencies may have restored every condition (e.g. a timed
  // out dependency re-passed check_data without being recalibrated); in
  // that case this node's own evidence is still valid and data on it would
  // be wasted.
  if (!spec.dependencies.empty() && check_state(id).passed) {
    report.visited.push_back({id, "check_state_pass"});
    return;
  }

  const CheckDataOutcome outcome = check_data(id);
  report.visited.push_back({id, "check_data"});

  const bool suspect =
      store_.record(id).status == NodeStatus::FailedUnresolved;
  switch (outcome.classification) {
    case CheckClass::InSpec:
      if (!suspect) return;
      break;  // stays suspect until a full calibrate succeeds
    case CheckClass::OutOfSpec:
      break;
    case CheckClass::BadData:
      report.visited.push_back({id, "diagnose"});
      diagnose(id);
      break;
  }
  calibrate_or_abort(id, &report);
}

std::vector<NodeId> Engine::diagnose(const NodeId& id) {
  log_.emit({device_.now(), "diagnose_enter", id, "", ""});
  std::vector<NodeId> recalibrated;
  std::vector<NodeId> checked;

  for (const NodeId& dep : graph_.node(id).dependencies) {
    checked.push_back(dep);
    const CheckDataOutcome outcome = check_data(dep);
    const bool suspect =
        store_.record(dep).status == NodeStatus::FailedUnresolved;
    switch (outcome.classification) {
      case CheckClass::InSpec:
        if (!suspect) continue;
        calibrate_or_abort(dep, nullptr);
        recalibrated.push_back(dep);
        break;
      case CheckClass::OutOfSpec:
        calibrate_or_abort(dep, nullptr);
        recalibrated.push_back(dep);
        break;
      case CheckClass::BadData: {
        const std::vector<NodeId> sub = diagnose(dep);
        recalibrated.insert(recalibrated.end(), sub.begin(), sub.end());
        calibrate_or_abort(dep, nullptr);
        recalibrated.push_back(dep);
        break;
      }
    }
  }

  if (recalibrated.empty()) {
    DiagnoseError err(id, checked);
    log_.emit({device_.now(), "error", id, "diagnose_error", err.what()});
    throw err;
  }
  log_.emit({device_.now(), "diagnose_exit", id, "ok",
             "recalibrated:" + join(recalibrated)});
  return recalibrated;
}

}  // namespace optimus
