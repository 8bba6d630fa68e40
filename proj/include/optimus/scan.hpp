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

#include <string>
#include <vector>

#include "optimus/graph.hpp"

namespace optimus {

enum class ExperimentKind {
  PrepareMeasure,  // prepare |0>/|1>, measure (raw histogram or classified)
  RabiDrive,       // drive pulse(s) of fixed duration, classified measurement
  Spectroscopy,    // long weak probe at a drive frequency, classified
  JointPhase,      // two-qubit conditional-phase evolution, joint readout
};

/// One fully resolved experiment: waveform knobs plus the stored readout
/// threshold(s) used to classify shots. Built by node behaviors; the device
/// never reads the state store.
struct Experiment {
  ExperimentKind kind = ExperimentKind::RabiDrive;
  std::string qubit;  // primary qubit label
  int prepared_state = 0;

  double drive_frequency_ghz = 0.0;
  double duration_ns = 0.0;
  int repeats = 1;

  // JointPhase only.
  std::string qubit_b;
  double interaction_time_ns = 0.0;
  double prep_a_ns = 0.0, prep_b_ns = 0.0;
  double drive_a_ghz = 0.0, drive_b_ghz = 0.0;
  double threshold_b = 0.0;

  double threshold = 0.0;  // classification threshold for `qubit`
};

struct ScanRequest {
  NodeId node;
  std::vector<double> abscissa;        // template points, for logs and plots
  std::vector<Experiment> experiments; // one per point
  int shots = 0;
  bool raw = false;  // return analog readout samples per point
};

struct ScanData {
  std::vector<double> abscissa;
  std::vector<double> measured;               // fraction classified per point
  std::vector<std::vector<double>> raw;       // per point, when requested
  int shots = 0;
};

}  // namespace optimus
