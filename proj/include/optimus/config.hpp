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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "optimus/behavior.hpp"
#include "optimus/device.hpp"
#include "optimus/graph.hpp"

namespace optimus {

/// A fault applied to the session at startup (device configs) or mid-run
/// (scenario scripts).
struct FaultSpec {
  std::string kind;  // "corrupt_param" | "flatline_readout"
  NodeId node;
  std::string param;
  double factor = 1.0;
};

struct DeviceSetup {
  std::vector<QubitTruth> qubits;
  std::uint64_t seed = 0;
  double experiment_cost_s = 1e-4;
  double cz_time_ns = 40.0;
  DriftConfig drift;
  std::vector<JumpEvent> jumps;
  std::vector<FaultSpec> faults;

  SimDevice make_device() const;
};

/// Graph config loading is strict: unknown keys are an error, every
/// dependency must resolve, behaviors must be registered, and each node
/// spec is validated by its behavior.
CalGraph load_graph_config(std::istream& in, const BehaviorRegistry& registry);
CalGraph load_graph_config_file(const std::string& path,
                                const BehaviorRegistry& registry);

DeviceSetup load_device_config(std::istream& in);
DeviceSetup load_device_config_file(const std::string& path);

}  // namespace optimus
