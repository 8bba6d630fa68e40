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

#include "optimus/config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"
#include "optimus/errors.hpp"

namespace optimus {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

ScanTemplate parse_scan(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  reject_unknown_keys(j, {"swept_parameter", "points", "shots_per_point"}, where);
  ScanTemplate scan;
  scan.swept_parameter = j.at("swept_parameter").get<std::string>();
  scan.points = j.at("points").get<std::vector<double>>();
  scan.shots_per_point = j.at("shots_per_point").get<int>();
  if (!scan.valid())
    throw ConfigError(where +
                      ": points must be non-empty, strictly increasing, "
                      "shots_per_point positive");
  return scan;
}

json parse_stream(std::istream& in, const std::string& what) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

CalGraph load_graph_config(std::istream& in, const BehaviorRegistry& registry) {
  const json root = parse_stream(in, "graph config");
  if (!root.is_object()) throw ConfigError("graph config must be an object");
  reject_unknown_keys(root, {"nodes"}, "graph config");

  std::vector<NodeSpec> specs;
  for (const json& n : root.at("nodes")) {
    if (!n.is_object()) throw ConfigError("graph node must be an object");
    const std::string where =
        "node '" + n.value("id", std::string("<unnamed>")) + "'";
    reject_unknown_keys(n,
                        {"id", "dependencies", "parameters", "timeout_s",
                         "tolerance", "behavior", "check_data_scan",
                         "calibrate_scan", "initial_guesses"},
                        where);
    try {
      NodeSpec spec;
      spec.id = n.at("id").get<std::string>();
      spec.dependencies = n.at("dependencies").get<std::vector<NodeId>>();
      spec.parameters = n.at("parameters").get<std::vector<std::string>>();
      spec.timeout_s = n.at("timeout_s").get<double>();
      for (const auto& [name, v] : n.at("tolerance").items())
        spec.tolerance[name] = v.get<double>();
      spec.behavior = n.at("behavior").get<std::string>();
      spec.check_data_scan = parse_scan(n.at("check_data_scan"),
                                        where + " check_data_scan");
      spec.calibrate_scan = parse_scan(n.at("calibrate_scan"),
                                       where + " calibrate_scan");
      if (n.contains("initial_guesses"))
        for (const auto& [name, v] : n.at("initial_guesses").items())
          spec.initial_guesses[name] = v.get<double>();
      specs.push_back(std::move(spec));
    } catch (const json::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }

  for (const NodeSpec& spec : specs) {
    auto it = registry.find(spec.behavior);
    if (it == registry.end())
      throw ConfigError("node '" + spec.id + "': unknown behavior '" +
                        spec.behavior + "'");
    it->second->validate_spec(spec);
  }
  return build_graph(specs);
}

CalGraph load_graph_config_file(const std::string& path,
                                const BehaviorRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph config: " + path);
  return load_graph_config(in, registry);
}

SimDevice DeviceSetup::make_device() const {
  return SimDevice(qubits, seed, experiment_cost_s, cz_time_ns, drift, jumps);
}

DeviceSetup load_device_config(std::istream& in) {
  const json root = parse_stream(in, "device config");
  if (!root.is_object()) throw ConfigError("device config must be an object");
  reject_unknown_keys(root,
                      {"seed", "experiment_cost_s", "qubits", "drift", "jumps",
                       "cz_time_ns", "faults"},
                      "device config");
  DeviceSetup setup;
  try {
    setup.seed = root.at("seed").get<std::uint64_t>();
    setup.experiment_cost_s = root.value("experiment_cost_s", 1e-4);
    setup.cz_time_ns = root.value("cz_time_ns", 40.0);
    for (const json& q : root.at("qubits")) {
      reject_unknown_keys(q,
                          {"label", "f_q_ghz", "rabi_rate_mhz",
                           "readout_sep_sigma", "t2_us",
                           "spectroscopy_drive_scale"},
                          "qubit entry");
      QubitTruth truth;
      truth.label = q.at("label").get<std::string>();
      truth.f_q_ghz = q.at("f_q_ghz").get<double>();
      truth.rabi_rate_mhz = q.at("rabi_rate_mhz").get<double>();
      const double sep = q.value("readout_sep_sigma", 4.0);
      truth.readout_c0 = 0.0;
      truth.readout_c1 = 1.0;
      truth.readout_sigma = sep > 0.0 ? 1.0 / sep : 1e9;
      truth.t2_like_ns = q.value("t2_us", 10.0) * 1000.0;
      truth.spect_drive_scale = q.value("spectroscopy_drive_scale", 0.5);
      setup.qubits.push_back(truth);
    }
    if (root.contains("drift"))
      for (const auto& [param, step] : root.at("drift").items())
        setup.drift.step_per_sqrt_s[param] = step.get<double>();
    if (root.contains("jumps"))
      for (const json& j : root.at("jumps")) {
        reject_unknown_keys(j, {"t", "param", "delta"}, "jump entry");
        setup.jumps.push_back({j.at("t").get<double>(),
                               j.at("param").get<std::string>(),
                               j.at("delta").get<double>()});
      }
    if (root.contains("faults"))
      for (const json& f : root.at("faults")) {
        reject_unknown_keys(f, {"kind", "node", "param", "factor"},
                            "fault entry");
        FaultSpec fault;
        fault.kind = f.at("kind").get<std::string>();
        if (fault.kind == "corrupt_param") {
          fault.node = f.at("node").get<std::string>();
          fault.param = f.at("param").get<std::string>();
          fault.factor = f.at("factor").get<double>();
        } else if (fault.kind != "flatline_readout") {
          throw ConfigError("unknown fault kind '" + fault.kind + "'");
        }
        setup.faults.push_back(std::move(fault));
      }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("device config: ") + e.what());
  }
  if (setup.qubits.empty()) throw ConfigError("device config: no qubits");
  return setup;
}

DeviceSetup load_device_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open device config: " + path);
  return load_device_config(in);
}

}  // namespace optimus
