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
#include <vector>

#include "optimus/rng.hpp"
#include "optimus/scan.hpp"

namespace optimus {

/// Hidden ground truth for one qubit. Readout is modeled as two Gaussian
/// signal histograms; assignment error derives from their overlap with the
/// stored threshold.
struct QubitTruth {
  std::string label;
  double f_q_ghz = 5.0;          // true qubit frequency
  double rabi_rate_mhz = 25.0;   // Omega / 2*pi at reference amplitude
  double readout_c0 = 0.0;       // ground-state histogram mean
  double readout_c1 = 1.0;       // excited-state histogram mean
  double readout_sigma = 0.25;   // histogram width
  double t2_like_ns = 10000.0;   // contrast envelope; <= 0 disables decay
  double spect_drive_scale = 0.5;  // spectroscopy drive amplitude fraction

  // Unit identity: pi_length[ns] * rabi_rate[MHz] = 500.
  double pi_length_ns() const { return 500.0 / rabi_rate_mhz; }
};

struct DriftConfig {
  // Random-walk step per sqrt(virtual second), keyed "<label>.<field>"
  // (e.g. "q0.f_q_ghz") or "cz_time_ns".
  std::map<std::string, double> step_per_sqrt_s;
};

struct JumpEvent {
  double t = 0.0;
  std::string param;
  double delta = 0.0;
};

class VirtualClock {
 public:
  double now() const { return now_; }
  void advance(double dt);

 private:
  double now_ = 0.0;
};

// ---- closed-form physics ----

/// Excited-state probability after `repeats` back-to-back drive pulses of
/// `duration_ns` at `drive_f_ghz`. Detuning tilts the rotation axis and
/// reduces contrast; a finite t2 pulls the coherent value toward 0.5.
double excited_probability(const QubitTruth& q, double drive_f_ghz,
                           double duration_ns, int repeats);

/// Time-averaged response of a long weak probe: a Lorentzian of half-width
/// spect_drive_scale * rabi_rate centered on the qubit frequency.
double spectroscopy_response(const QubitTruth& q, double drive_f_ghz);

/// Probability that one shot is classified "1" given the excited-state
/// probability and a readout threshold.
double classified_one_probability(const QubitTruth& q, double p_excited,
                                  double threshold);

/// Standard normal CDF.
double normal_cdf(double x);

/// Deterministic simulated multi-qubit device: hidden truth, binomial
/// sampling from one seeded RNG, a virtual clock, drift/jump processes and
/// injectable faults. One instance is owned by one session.
class SimDevice {
 public:
  SimDevice(std::vector<QubitTruth> qubits, std::uint64_t seed,
            double experiment_cost_s = 1e-4, double cz_time_ns = 40.0,
            DriftConfig drift = {}, std::vector<JumpEvent> jumps = {});

  double now() const { return clock_.now(); }
  long experiment_count() const { return experiment_count_; }

  const QubitTruth& qubit(const std::string& label) const;
  double cz_time_ns() const { return cz_time_ns_; }
  std::size_t num_qubits() const { return qubits_.size(); }
  const std::vector<QubitTruth>& qubits() const { return qubits_; }

  /// Runs one scan: per point, compute the true probability, sample shots,
  /// advance the clock by points * shots * cost, count one experiment per
  /// point. Raw mode returns analog readout samples (unaffected by the
  /// flatline fault, which models a broken classification stage).
  ScanData execute_scan(const ScanRequest& request);

  /// Advances the clock and applies drift: each configured truth parameter
  /// takes a Gaussian step of magnitude step * sqrt(dt); scheduled jumps
  /// whose time falls inside the window fire exactly once.
  void advance_and_drift(double dt);

  void set_flatline_readout(bool on) { flatline_ = on; }
  bool flatline_readout() const { return flatline_; }

  /// Direct truth access for tests and jump application.
  void apply_param_delta(const std::string& param, double delta);

 private:
  double true_probability(const Experiment& e) const;
  void apply_jumps_through(double t);

  std::vector<QubitTruth> qubits_;
  std::map<std::string, std::size_t> index_;
  Rng rng_;
  VirtualClock clock_;
  double experiment_cost_s_;
  double cz_time_ns_;
  DriftConfig drift_;
  std::vector<JumpEvent> jumps_;
  std::size_t next_jump_ = 0;
  long experiment_count_ = 0;
  bool flatline_ = false;
};

}  // namespace optimus
