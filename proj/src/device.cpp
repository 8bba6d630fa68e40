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

#include "optimus/device.hpp"

#include <algorithm>
#include <cmath>

#include "optimus/errors.hpp"

namespace optimus {

void VirtualClock::advance(double dt) {
  if (dt < 0.0) throw Error("clock cannot run backwards");
  now_ += dt;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double excited_probability(const QubitTruth& q, double drive_f_ghz,
                           double duration_ns, int repeats) {
  // Angular frequencies in 1/ns: 1 GHz == 1/ns, 1 MHz == 1e-3/ns.
  const double omega = 2.0 * M_PI * q.rabi_rate_mhz * 1e-3;
  const double delta = 2.0 * M_PI * (drive_f_ghz - q.f_q_ghz);
  const double omega_eff = std::sqrt(omega * omega + delta * delta);
  const double contrast = omega_eff > 0.0
                              ? (omega * omega) / (omega_eff * omega_eff)
                              : 1.0;
  // Rotations about a fixed tilted axis compose exactly: `repeats`
  // back-to-back pulses give a total angle of repeats * omega_eff * t.
  const double total_angle = omega_eff * duration_ns * repeats;
  const double s = std::sin(0.5 * total_angle);
  double p = contrast * s * s;
  if (q.t2_like_ns > 0.0) {
    const double env = std::exp(-(duration_ns * repeats) / q.t2_like_ns);
    p = 0.5 + (p - 0.5) * env;
  }
  return std::clamp(p, 0.0, 1.0);
}

double spectroscopy_response(const QubitTruth& q, double drive_f_ghz) {
  const double gamma_ghz = q.spect_drive_scale * q.rabi_rate_mhz * 1e-3;
  const double df = drive_f_ghz - q.f_q_ghz;
  return 0.5 * gamma_ghz * gamma_ghz / (gamma_ghz * gamma_ghz + df * df);
}

double classified_one_probability(const QubitTruth& q, double p_excited,
                                  double threshold) {
  const double p1_given_1 = normal_cdf((q.readout_c1 - threshold) / q.readout_sigma);
  const double p1_given_0 = normal_cdf((q.readout_c0 - threshold) / q.readout_sigma);
  return p_excited * p1_given_1 + (1.0 - p_excited) * p1_given_0;
}

SimDevice::SimDevice(std::vector<QubitTruth> qubits, std::uint64_t seed,
                     double experiment_cost_s, double cz_time_ns,
                     DriftConfig drift, std::vector<JumpEvent> jumps)
    : qubits_(std::move(qubits)),
      rng_(seed),
      experiment_cost_s_(experiment_cost_s),
      cz_time_ns_(cz_time_ns),
      drift_(std::move(drift)),
      jumps_(std::move(jumps)) {
  for (std::size_t i = 0; i < qubits_.size(); ++i) index_[qubits_[i].label] = i;
  std::stable_sort(jumps_.begin(), jumps_.end(),
                   [](const JumpEvent& a, const JumpEvent& b) { return a.t < b.t; });
}

const QubitTruth& SimDevice::qubit(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw UnknownQubitError(label);
  return qubits_[it->second];
}

void SimDevice::apply_param_delta(const std::string& param, double delta) {
  if (param == "cz_time_ns") {
    cz_time_ns_ += delta;
    return;
  }
  auto dot = param.find('.');
  if (dot == std::string::npos) throw UnknownTargetError(param);
  const std::string label = param.substr(0, dot);
  const std::string field = param.substr(dot + 1);
  auto it = index_.find(label);
  if (it == index_.end()) throw UnknownTargetError(param);
  QubitTruth& q = qubits_[it->second];
  if (field == "f_q_ghz")
    q.f_q_ghz += delta;
  else if (field == "rabi_rate_mhz")
    q.rabi_rate_mhz += delta;
  else if (field == "readout_sigma")
    q.readout_sigma += delta;
  else
    throw UnknownTargetError(param);
}

void SimDevice::apply_jumps_through(double t) {
  while (next_jump_ < jumps_.size() && jumps_[next_jump_].t <= t) {
    apply_param_delta(jumps_[next_jump_].param, jumps_[next_jump_].delta);
    ++next_jump_;
  }
}

double SimDevice::true_probability(const Experiment& e) const {
  switch (e.kind) {
    case ExperimentKind::PrepareMeasure:
      return e.prepared_state == 0 ? 0.0 : 1.0;
    case ExperimentKind::RabiDrive:
      return excited_probability(qubit(e.qubit), e.drive_frequency_ghz,
                                 e.duration_ns, e.repeats);
    case ExperimentKind::Spectroscopy:
      return spectroscopy_response(qubit(e.qubit), e.drive_frequency_ghz);
    case ExperimentKind::JointPhase: {
      const QubitTruth& qa = qubit(e.qubit);
      const QubitTruth& qb = qubit(e.qubit_b);
      // Preparation quality: each qubit should sit on the equator after a
      // half-pi pulse; coherence scales as 4 q (1 - q).
      const double pa = excited_probability(qa, e.drive_a_ghz, e.prep_a_ns, 1);
      const double pb = excited_probability(qb, e.drive_b_ghz, e.prep_b_ns, 1);
      double contrast = (4.0 * pa * (1.0 - pa)) * (4.0 * pb * (1.0 - pb));
      const double t2 = 0.5 * (qa.t2_like_ns + qb.t2_like_ns);
      if (t2 > 0.0) contrast *= std::exp(-e.interaction_time_ns / t2);
      const double p_ideal =
          0.5 - 0.5 * std::cos(M_PI * e.interaction_time_ns / cz_time_ns_);
      const double p = 0.5 + (p_ideal - 0.5) * contrast;
      // Joint readout: each qubit's assignment fidelity degrades the
      // measured parity contrast independently.
      auto fidelity = [](const QubitTruth& q, double thr) {
        const double f1 = normal_cdf((q.readout_c1 - thr) / q.readout_sigma);
        const double f0 = normal_cdf((thr - q.readout_c0) / q.readout_sigma);
        return 0.5 * (f1 + f0);
      };
      const double ka = 2.0 * fidelity(qa, e.threshold) - 1.0;
      const double kb = 2.0 * fidelity(qb, e.threshold_b) - 1.0;
      return std::clamp(0.5 + (p - 0.5) * ka * kb, 0.0, 1.0);
    }
  }
  return 0.0;
}

ScanData SimDevice::execute_scan(const ScanRequest& request) {
  if (request.experiments.size() != request.abscissa.size())
    throw Error("scan request: abscissa/experiment size mismatch");
  ScanData data;
  data.abscissa = request.abscissa;
  data.shots = request.shots;
  data.measured.reserve(request.experiments.size());
  if (request.raw) data.raw.reserve(request.experiments.size());

  for (const Experiment& e : request.experiments) {
    const QubitTruth& q = qubit(e.qubit);
    if (request.raw) {
      // Analog histogram samples; the discrimination stage (and therefore
      // the flatline fault) is not involved.
      const double p_exc = true_probability(e);
      std::vector<double> samples;
      samples.reserve(request.shots);
      long classified = 0;
      for (int s = 0; s < request.shots; ++s) {
        const bool excited = rng_.uniform() < p_exc;
        const double center = excited ? q.readout_c1 : q.readout_c0;
        const double sig = center + q.readout_sigma * rng_.gaussian();
        samples.push_back(sig);
        if (sig > e.threshold) ++classified;
      }
      data.raw.push_back(std::move(samples));
      data.measured.push_back(static_cast<double>(classified) / request.shots);
    } else {
      double p_one;
      if (flatline_) {
        p_one = 0.5;
      } else if (e.kind == ExperimentKind::JointPhase) {
        p_one = true_probability(e);  // readout already folded in
      } else {
        p_one = classified_one_probability(q, true_probability(e), e.threshold);
      }
      const long count = rng_.binomial(request.shots, p_one);
      data.measured.push_back(static_cast<double>(count) / request.shots);
    }
    ++experiment_count_;
  }

  const double dt = static_cast<double>(request.experiments.size()) *
                    request.shots * experiment_cost_s_;
  clock_.advance(dt);
  apply_jumps_through(clock_.now());
  return data;
}

void SimDevice::advance_and_drift(double dt) {
  if (dt < 0.0) throw Error("advance_and_drift: dt must be >= 0");
  if (dt == 0.0) return;
  clock_.advance(dt);
  for (const auto& [param, step] : drift_.step_per_sqrt_s) {
    if (step <= 0.0) continue;
    apply_param_delta(param, step * std::sqrt(dt) * rng_.gaussian());
  }
  apply_jumps_through(clock_.now());
}

}  // namespace optimus
