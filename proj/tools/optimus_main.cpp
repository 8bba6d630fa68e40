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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "optimus/config.hpp"
#include "optimus/errors.hpp"
#include "optimus/scenario.hpp"
#include "optimus/session.hpp"

namespace {

using namespace optimus;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalidGraph = 2;
constexpr int kExitDiagnoseError = 3;
constexpr int kExitCalibrateFailed = 4;
constexpr int kExitAssertFailed = 5;

int cmd_validate(const std::string& graph_path) {
  CalGraph graph;
  try {
    graph = load_graph_config_file(graph_path, default_behavior_registry());
  } catch (const CycleDetectedError& e) {
    std::cerr << "invalid graph: " << e.what() << "\n";
    return kExitInvalidGraph;
  } catch (const UnknownDependencyError& e) {
    std::cerr << "invalid graph: " << e.what() << "\n";
    return kExitInvalidGraph;
  } catch (const DuplicateNodeError& e) {
    std::cerr << "invalid graph: " << e.what() << "\n";
    return kExitInvalidGraph;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  std::cout << "nodes: " << graph.size() << "\n";
  std::cout << "edges:\n";
  for (const NodeId& id : graph.declaration_order())
    for (const NodeId& dep : graph.node(id).dependencies)
      std::cout << id << " -> " << dep << "\n";
  std::cout << "order:";
  for (const NodeId& id : graph.topological_order()) std::cout << " " << id;
  std::cout << "\n";
  return kExitOk;
}

std::optional<StateStore> load_state_file(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open state snapshot: " + path);
  return StateStore::restore(in);
}

void print_report(const Session& session, const MaintainReport& report,
                  double t_start) {
  std::cout << "target: " << report.target << "\n";
  std::cout << "visited:\n";
  for (const MaintainAction& a : report.visited)
    std::cout << "  " << a.node << " " << a.action << "\n";
  std::cout << "experiments_run: " << report.experiments_run << "\n";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", session.device().now() - t_start);
  std::cout << "virtual_seconds: " << buf << "\n";
  std::cout << "success: " << (report.success ? "true" : "false") << "\n";
}

int cmd_maintain(const std::string& graph_path, const std::string& device_path,
                 const std::string& state_path, const std::string& target,
                 const std::string& out_dir, double advance_s) {
  try {
    CalGraph graph =
        load_graph_config_file(graph_path, default_behavior_registry());
    DeviceSetup setup = load_device_config_file(device_path);
    Session session(std::move(graph), setup, default_behavior_registry(),
                    load_state_file(state_path));
    if (advance_s > 0.0) session.advance(advance_s);
    const double t0 = session.device().now();
    const SessionMaintainResult result = session.maintain(target);
    session.write_outputs(out_dir);
    print_report(session, result.report, t0);
    if (result.error_kind == "diagnose_error") {
      std::cerr << "DiagnoseError: " << result.error_message << "\n";
      return kExitDiagnoseError;
    }
    if (result.error_kind == "bad_data_in_calibrate") {
      std::cerr << "BadDataInCalibrate: " << result.error_message << "\n";
      return kExitCalibrateFailed;
    }
    if (!result.report.success) {
      std::cerr << "calibrate failed; see event log\n";
      return kExitCalibrateFailed;
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int cmd_status(const std::string& state_path) {
  try {
    std::ifstream in(state_path);
    if (!in) throw ConfigError("cannot open state snapshot: " + state_path);
    const StateStore store = StateStore::restore(in);

    // Snapshots do not carry the session clock; age is shown relative to
    // the newest timestamp in the snapshot.
    double latest = 0.0;
    for (const auto& [id, rec] : store.records())
      if (rec.last_pass_time) latest = std::max(latest, *rec.last_pass_time);
    for (const auto& [key, e] : store.params().entries())
      latest = std::max(latest, e.time);

    std::printf("%-28s %-18s %12s %8s  %s\n", "node", "status", "age_s",
                "version", "figures_of_merit");
    for (const auto& [id, rec] : store.records()) {
      std::string age = "-";
      if (rec.last_pass_time) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.1f", latest - *rec.last_pass_time);
        age = buf;
      }
      std::string foms;
      for (const auto& [name, v] : rec.last_figures_of_merit) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s%s=%.6g", foms.empty() ? "" : " ",
                      name.c_str(), v);
        foms += buf;
      }
      std::printf("%-28s %-18s %12s %8ld  %s\n", id.c_str(),
                  to_string(rec.status), age.c_str(), rec.cal_version,
                  foms.c_str());
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int cmd_scenario(const std::string& script_path, const std::string& graph_path,
                 const std::string& device_path, const std::string& state_path,
                 const std::string& out_dir) {
  try {
    std::ifstream script(script_path);
    if (!script) throw ConfigError("cannot open scenario: " + script_path);
    CalGraph graph =
        load_graph_config_file(graph_path, default_behavior_registry());
    DeviceSetup setup = load_device_config_file(device_path);
    Session session(std::move(graph), setup, default_behavior_registry(),
                    load_state_file(state_path));
    const ScenarioResult result = run_scenario(script, session, std::cout);
    if (!out_dir.empty()) session.write_outputs(out_dir);
    return result.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-driven qubit calibration engine on a simulated device"};
  app.require_subcommand(1);

  std::string graph_path, device_path, state_path, target, out_dir, script_path;
  double advance_s = 0.0;

  CLI::App* validate = app.add_subcommand("validate", "validate a graph config");
  validate->add_option("graph", graph_path, "graph config (JSON)")->required();

  CLI::App* maintain =
      app.add_subcommand("maintain", "bring a target node in spec");
  maintain->add_option("--graph", graph_path)->required();
  maintain->add_option("--device", device_path)->required();
  maintain->add_option("--state", state_path);
  maintain->add_option("--target", target)->required();
  maintain->add_option("--out", out_dir)->required();
  maintain->add_option("--advance", advance_s,
                       "advance the virtual clock before maintaining");

  CLI::App* status = app.add_subcommand("status", "print a state snapshot");
  status->add_option("--state", state_path)->required();

  CLI::App* scenario =
      app.add_subcommand("scenario", "run a scripted scenario");
  scenario->add_option("script", script_path)->required();
  scenario->add_option("--graph", graph_path)->required();
  scenario->add_option("--device", device_path)->required();
  scenario->add_option("--state", state_path);
  scenario->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(graph_path);
  if (maintain->parsed())
    return cmd_maintain(graph_path, device_path, state_path, target, out_dir,
                        advance_s);
  if (status->parsed()) return cmd_status(state_path);
  if (scenario->parsed())
    return cmd_scenario(script_path, graph_path, device_path, state_path,
                        out_dir);
  return kExitIo;
}
