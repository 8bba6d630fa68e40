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

#include <algorithm>
#include <cmath>
#include <functional>

#include "optimus/behavior.hpp"
#include "optimus/device.hpp"
#include "optimus/errors.hpp"
#include "optimus/fit.hpp"

namespace optimus {

namespace {

// Fitted amplitudes below this are indistinguishable from a dead scan.
constexpr double kMinContrast = 0.08;
constexpr double kNoiseSigmas = 5.0;

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double rms_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// The stored discrimination model of a qubit's readout, resolved through
// the dependency chain back to its readout_threshold cal.
struct ReadoutModel {
  double c0, c1, sigma, threshold;
};

ReadoutModel resolve_readout(const ParamResolver& params, const NodeId& start) {
  return ReadoutModel{params.require_from(start, "readout_c0"),
                      params.require_from(start, "readout_c1"),
                      params.require_from(start, "readout_sigma"),
                      params.require_from(start, "readout_threshold")};
}

double resolve_or(const ParamResolver& params, const std::string& name,
                  double fallback) {
  auto v = params.own(name);
  return v ? *v : fallback;
}

// SSE of measured data against a model curve parameterized by one scalar.
double shift_sse(const std::vector<double>& measured,
                 const std::function<double(std::size_t, double)>& model,
                 double value) {
  double s = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const double r = measured[i] - model(i, value);
    s += r * r;
  }
  return s;
}

RefitResult refit_scalar(const std::vector<double>& measured,
                         const std::function<double(std::size_t, double)>& model,
                         double lo, double hi, int candidates) {
  auto sse = [&](double v) { return shift_sse(measured, model, v); };
  const double best = scan_then_golden(sse, lo, hi, candidates);
  RefitResult out;
  out.shift = best;
  out.residual_rms = std::sqrt(sse(best) / static_cast<double>(measured.size()));
  return out;
}

// ---------------------------------------------------------------------------
// readout_threshold: calibrates the 0/1 discrimination threshold from two
// reference histograms. Root cal; runs on an otherwise unknown system.
// ---------------------------------------------------------------------------
class ReadoutThresholdBehavior : public NodeBehavior {
 public:
  std::string name() const override { return "readout_threshold"; }
  std::string primary_parameter() const override { return "readout_threshold"; }
  std::string shift_fom_name() const override { return "fidelity"; }

  bool ready_to_check(const BehaviorContext& ctx) const override {
    return ctx.params.own("readout_threshold") && ctx.params.own("readout_c0") &&
           ctx.params.own("readout_c1") && ctx.params.own("readout_sigma");
  }

  void validate_spec(const NodeSpec& spec) const override {
    NodeBehavior::validate_spec(spec);
    for (const ScanTemplate* scan : {&spec.check_data_scan, &spec.calibrate_scan})
      if (scan->points != std::vector<double>{0.0, 1.0})
        throw ConfigError("node '" + spec.id +
                          "': readout_threshold scans sweep prepared_state "
                          "and need points [0, 1]");
  }

  ScanRequest build_scan(ScanKind kind, const BehaviorContext& ctx) const override {
    const ScanTemplate& tmpl = kind == ScanKind::CheckData
                                   ? ctx.spec.check_data_scan
                                   : ctx.spec.calibrate_scan;
    ScanRequest req;
    req.node = ctx.spec.id;
    req.abscissa = tmpl.points;
    req.shots = tmpl.shots_per_point;
    // Both scans record raw histograms: this cal owns the discrimination
    // stage, so it inspects the analog signals directly. The check scan
    // classifies them against the stored threshold.
    req.raw = true;
    const std::string qubit = qubit_label_of(ctx.spec.id);
    const double threshold = kind == ScanKind::Calibrate
                                 ? 0.0
                                 : ctx.params.require("readout_threshold");
    for (double p : tmpl.points) {
      Experiment e;
      e.kind = ExperimentKind::PrepareMeasure;
      e.qubit = qubit;
      e.prepared_state = static_cast<int>(p);
      e.threshold = threshold;
      req.experiments.push_back(e);
    }
    return req;
  }

  std::vector<double> expected_curve(const BehaviorContext& ctx,
                                     const ScanRequest& request) const override {
    const double c0 = ctx.params.require("readout_c0");
    const double c1 = ctx.params.require("readout_c1");
    const double sigma = ctx.params.require("readout_sigma");
    const double thr = ctx.params.require("readout_threshold");
    std::vector<double> out;
    for (const Experiment& e : request.experiments) {
      const double c = e.prepared_state == 0 ? c0 : c1;
      out.push_back(normal_cdf((c - thr) / sigma));
    }
    return out;
  }

  RefitResult refit_target(const BehaviorContext& ctx, const ScanRequest& request,
                           const std::vector<double>& measured) const override {
    const double c0 = ctx.params.require("readout_c0");
    const double c1 = ctx.params.require("readout_c1");
    const double sigma = ctx.params.require("readout_sigma");
    const double thr = ctx.params.require("readout_threshold");
    auto model = [&](std::size_t i, double t) {
      const double c = request.experiments[i].prepared_state == 0 ? c0 : c1;
      return normal_cdf((c - t) / sigma);
    };
    const double lo = std::min(c0, c1) - 4.0 * sigma;
    const double hi = std::max(c0, c1) + 4.0 * sigma;
    RefitResult r = refit_scalar(measured, model, lo, hi, 128);
    r.shift -= thr;
    return r;
  }

  // Fidelity has a lower-bound tolerance, unlike the shift-style cals, so
  // the in/out decision is made here instead of in the shared classifier.
  CheckDataOutcome analyze_check(const BehaviorContext& ctx,
                                 const ScanRequest& request,
                                 const ScanData& data) const override {
    RefitResult refit = refit_target(ctx, request, data.measured);
    const double noise = kNoiseSigmas * shot_noise(data.measured, data.shots);
    const double fidelity =
        0.5 * (data.measured[1] + 1.0 - data.measured[0]);
    CheckDataOutcome out;
    out.figures_of_merit["fidelity"] = fidelity;
    out.figures_of_merit["residual_rms"] = refit.residual_rms;
    if (refit.residual_rms > noise) {
      out.classification = CheckClass::BadData;
      out.detail = "residual " + fmt_g(refit.residual_rms) + " above noise " +
                   fmt_g(noise);
      return out;
    }
    const double tol = ctx.spec.tolerance.at("fidelity");
    if (fidelity >= tol) {
      out.classification = CheckClass::InSpec;
    } else {
      out.classification = CheckClass::OutOfSpec;
      out.fitted_shift = refit.shift;
      out.detail = "fidelity " + fmt_g(fidelity) + " below " + fmt_g(tol);
    }
    return out;
  }

  CalibrationAnalysis analyze_calibrate(const BehaviorContext& ctx,
                                        const ScanRequest& request,
                                        const ScanData& data) const override {
    (void)request;
    if (data.raw.size() != 2)
      throw Error("readout_threshold calibrate needs raw histograms");
    const std::vector<double>& s0 = data.raw[0];
    const std::vector<double>& s1 = data.raw[1];
    const double c0 = mean(s0);
    const double c1 = mean(s1);
    double var = 0.0;
    for (double v : s0) var += (v - c0) * (v - c0);
    for (double v : s1) var += (v - c1) * (v - c1);
    const double sigma = std::sqrt(var / static_cast<double>(s0.size() + s1.size()));
    const double thr = 0.5 * (c0 + c1);
    long correct = 0;
    for (double v : s0)
      if (v <= thr) ++correct;
    for (double v : s1)
      if (v > thr) ++correct;
    const double fidelity =
        static_cast<double>(correct) / static_cast<double>(s0.size() + s1.size());

    CalibrationAnalysis out;
    out.params = {{"readout_threshold", thr},
                  {"readout_c0", c0},
                  {"readout_c1", c1},
                  {"readout_sigma", sigma}};
    out.figures_of_merit = {{"fidelity", fidelity},
                            {"separation_sigma", sigma > 0.0 ? (c1 - c0) / sigma : 0.0}};
    const double tol = ctx.spec.tolerance.at("fidelity");
    out.verdict = fidelity >= tol ? CalVerdict::Success : CalVerdict::OutOfTolerance;
    if (out.verdict != CalVerdict::Success)
      out.detail = "fidelity " + fmt_g(fidelity) + " below " + fmt_g(tol);
    return out;
  }
};

// ---------------------------------------------------------------------------
// spectroscopy: finds the qubit frequency as the peak of the response vs
// drive frequency. check_data points are offsets from the stored frequency;
// the calibrate grid is absolute.
// ---------------------------------------------------------------------------
class SpectroscopyBehavior : public NodeBehavior {
 public:
  std::string name() const override { return "spectroscopy"; }
  std::string primary_parameter() const override { return "qubit_frequency_ghz"; }
  std::string shift_fom_name() const override { return "frequency_shift_ghz"; }

  ScanRequest build_scan(ScanKind kind, const BehaviorContext& ctx) const override {
    const ScanTemplate& tmpl = kind == ScanKind::CheckData
                                   ? ctx.spec.check_data_scan
                                   : ctx.spec.calibrate_scan;
    ScanRequest req;
    req.node = ctx.spec.id;
    req.abscissa = tmpl.points;
    req.shots = tmpl.shots_per_point;
    const std::string qubit = qubit_label_of(ctx.spec.id);
    const ReadoutModel ro = resolve_readout(ctx.params, ctx.spec.id);
    const double f0 =
        kind == ScanKind::CheckData ? ctx.params.require("qubit_frequency_ghz") : 0.0;
    for (double p : tmpl.points) {
      Experiment e;
      e.kind = ExperimentKind::Spectroscopy;
      e.qubit = qubit;
      e.drive_frequency_ghz = kind == ScanKind::CheckData ? f0 + p : p;
      e.threshold = ro.threshold;
      req.experiments.push_back(e);
    }
    return req;
  }

  std::vector<double> expected_curve(const BehaviorContext& ctx,
                                     const ScanRequest& request) const override {
    const double center = ctx.params.require("qubit_frequency_ghz");
    std::vector<double> out;
    for (const Experiment& e : request.experiments)
      out.push_back(model_at(ctx, e.drive_frequency_ghz, center));
    return out;
  }

  RefitResult refit_target(const BehaviorContext& ctx, const ScanRequest& request,
                           const std::vector<double>& measured) const override {
    const double stored = ctx.params.require("qubit_frequency_ghz");
    auto model = [&](std::size_t i, double center) {
      return model_at(ctx, request.experiments[i].drive_frequency_ghz, center);
    };
    double fmin = request.experiments.front().drive_frequency_ghz;
    double fmax = request.experiments.back().drive_frequency_ghz;
    const double span = fmax - fmin;
    RefitResult r =
        refit_scalar(measured, model, fmin - 0.5 * span, fmax + 0.5 * span, 256);
    r.shift -= stored;
    return r;
  }

  CalibrationAnalysis analyze_calibrate(const BehaviorContext& ctx,
                                        const ScanRequest& request,
                                        const ScanData& data) const override {
    const std::vector<double>& f = request.abscissa;
    LorentzianFitOptions opt;
    opt.center_lo = f.front();
    opt.center_hi = f.back();
    const double dx = f[1] - f[0];
    opt.width_lo = 0.5 * dx;
    opt.width_hi = 0.5 * (f.back() - f.front());
    const LorentzianFit fit = fit_lorentzian(f, data.measured, opt);

    CalibrationAnalysis out;
    out.figures_of_merit = {{"frequency_shift_ghz", fit.sigma_center},
                            {"peak_snr",
                             fit.amplitude / std::max(shot_noise(data.measured, data.shots), 1e-12)},
                            {"r_squared", fit.r_squared}};
    if (fit.amplitude < kMinContrast) {
      out.verdict = CalVerdict::BadData;
      out.detail = "no peak in window (amplitude " + fmt_g(fit.amplitude) + ")";
      return out;
    }
    out.params = {{"qubit_frequency_ghz", fit.center},
                  {"linewidth_ghz", fit.width},
                  {"line_amplitude", fit.amplitude},
                  {"line_background", fit.background}};
    const double tol = ctx.spec.tolerance.at("frequency_shift_ghz");
    out.verdict = fit.sigma_center <= tol ? CalVerdict::Success
                                          : CalVerdict::OutOfTolerance;
    if (out.verdict != CalVerdict::Success)
      out.detail = "center uncertainty " + fmt_g(fit.sigma_center) + " above " +
                   fmt_g(tol);
    return out;
  }

 private:
  double model_at(const BehaviorContext& ctx, double drive_f, double center) const {
    const double bg = resolve_or(ctx.params, "line_background", 0.02);
    const double amp = resolve_or(ctx.params, "line_amplitude", 0.45);
    const double w = resolve_or(ctx.params, "linewidth_ghz", 0.01);
    const double df = drive_f - center;
    return bg + amp * w * w / (w * w + df * df);
  }
};

// ---------------------------------------------------------------------------
// rabi_coarse: pi-pulse length from a single-pulse duration sweep with a
// cosine fit. Also instantiated for mid-precision nodes with a denser grid.
// The check scan sweeps duration as multiples of the stored pi length.
// ---------------------------------------------------------------------------
class RabiDurationBehavior : public NodeBehavior {
 public:
  std::string name() const override { return "rabi_coarse"; }
  std::string primary_parameter() const override { return "pi_length_ns"; }
  std::string shift_fom_name() const override { return "pi_length_shift_ns"; }

  ScanRequest build_scan(ScanKind kind, const BehaviorContext& ctx) const override {
    const ScanTemplate& tmpl = kind == ScanKind::CheckData
                                   ? ctx.spec.check_data_scan
                                   : ctx.spec.calibrate_scan;
    ScanRequest req;
    req.node = ctx.spec.id;
    req.abscissa = tmpl.points;
    req.shots = tmpl.shots_per_point;
    const std::string qubit = qubit_label_of(ctx.spec.id);
    const double drive = ctx.params.require("qubit_frequency_ghz");
    const ReadoutModel ro = resolve_readout(ctx.params, ctx.spec.id);
    const double pi_len =
        kind == ScanKind::CheckData ? ctx.params.require("pi_length_ns") : 0.0;
    for (double p : tmpl.points) {
      Experiment e;
      e.kind = ExperimentKind::RabiDrive;
      e.qubit = qubit;
      e.drive_frequency_ghz = drive;
      e.duration_ns = kind == ScanKind::CheckData ? p * pi_len : p;
      e.repeats = 1;
      e.threshold = ro.threshold;
      req.experiments.push_back(e);
    }
    return req;
  }

  std::vector<double> expected_curve(const BehaviorContext& ctx,
                                     const ScanRequest& request) const override {
    const double pi_len = ctx.params.require("pi_length_ns");
    std::vector<double> out;
    for (const Experiment& e : request.experiments)
      out.push_back(model_at(ctx, e.duration_ns, pi_len));
    return out;
  }

  RefitResult refit_target(const BehaviorContext& ctx, const ScanRequest& request,
                           const std::vector<double>& measured) const override {
    const double stored = ctx.params.require("pi_length_ns");
    auto model = [&](std::size_t i, double pi_len) {
      return model_at(ctx, request.experiments[i].duration_ns, pi_len);
    };
    RefitResult r =
        refit_scalar(measured, model, 0.65 * stored, 1.35 * stored, 128);
    r.shift -= stored;
    return r;
  }

  CalibrationAnalysis analyze_calibrate(const BehaviorContext& ctx,
                                        const ScanRequest& request,
                                        const ScanData& data) const override {
    const std::vector<double>& t = request.abscissa;
    CosineFitOptions opt;
    opt.fixed_phase = M_PI;  // P(0) = 0: the curve starts at a trough
    const auto prior = ctx.params.find("pi_length_ns");
    if (prior && *prior > 0.0) {
      opt.freq_lo = 1.0 / (2.0 * 1.4 * *prior);
      opt.freq_hi = 1.0 / (2.0 * 0.7 * *prior);
      opt.candidates = 128;
    } else {
      const double span = t.back() - t.front();
      const double dx = t[1] - t[0];
      opt.freq_lo = 1.0 / (4.0 * span);
      opt.freq_hi = 1.0 / (2.0 * dx);
      opt.candidates = 512;
    }
    const CosineFit fit = fit_cosine(t, data.measured, opt);

    CalibrationAnalysis out;
    const double pi_len = 1.0 / (2.0 * fit.frequency);
    const double sigma_pi = fit.sigma_frequency * pi_len / fit.frequency;
    out.figures_of_merit = {{"pi_length_shift_ns", sigma_pi},
                            {"contrast", 2.0 * fit.amplitude},
                            {"r_squared", fit.r_squared}};
    if (fit.amplitude < kMinContrast) {
      out.verdict = CalVerdict::BadData;
      out.detail = "no oscillation (amplitude " + fmt_g(fit.amplitude) + ")";
      return out;
    }
    out.params = {{"pi_length_ns", pi_len},
                  {"rabi_amplitude", fit.amplitude},
                  {"rabi_offset", fit.offset}};
    const double tol = ctx.spec.tolerance.at("pi_length_shift_ns");
    out.verdict = sigma_pi <= tol ? CalVerdict::Success : CalVerdict::OutOfTolerance;
    if (out.verdict != CalVerdict::Success)
      out.detail = "pi-length uncertainty " + fmt_g(sigma_pi) + " above " + fmt_g(tol);
    return out;
  }

 private:
  double model_at(const BehaviorContext& ctx, double duration, double pi_len) const {
    const double amp = resolve_or(ctx.params, "rabi_amplitude", 0.45);
    const double off = resolve_or(ctx.params, "rabi_offset", 0.5);
    return off - amp * std::cos(M_PI * duration / pi_len);
  }
};

// ---------------------------------------------------------------------------
// rabi_fine: error-amplified pi-pulse calibration. Each point drives
// `repeats` back-to-back pulses so a rotation-angle error grows repeats-fold
// and becomes measurable. Scan points are duration offsets (ns) around the
// currently stored pi length.
// ---------------------------------------------------------------------------
class RabiAmplifiedBehavior : public NodeBehavior {
 public:
  explicit RabiAmplifiedBehavior(int repeats = 11) : repeats_(repeats) {}

  std::string name() const override { return "rabi_fine"; }
  std::string primary_parameter() const override { return "pi_length_ns"; }
  std::string shift_fom_name() const override { return "rotation_angle_error_rad"; }

  ScanRequest build_scan(ScanKind kind, const BehaviorContext& ctx) const override {
    const ScanTemplate& tmpl = kind == ScanKind::CheckData
                                   ? ctx.spec.check_data_scan
                                   : ctx.spec.calibrate_scan;
    ScanRequest req;
    req.node = ctx.spec.id;
    req.abscissa = tmpl.points;
    req.shots = tmpl.shots_per_point;
    const std::string qubit = qubit_label_of(ctx.spec.id);
    const double drive = ctx.params.require("qubit_frequency_ghz");
    const ReadoutModel ro = resolve_readout(ctx.params, ctx.spec.id);
    // First calibration centers on the mid/coarse value from the chain.
    const double center = ctx.params.require("pi_length_ns");
    for (double p : tmpl.points) {
      Experiment e;
      e.kind = ExperimentKind::RabiDrive;
      e.qubit = qubit;
      e.drive_frequency_ghz = drive;
      e.duration_ns = center + p;
      e.repeats = repeats_;
      e.threshold = ro.threshold;
      req.experiments.push_back(e);
    }
    return req;
  }

  std::vector<double> expected_curve(const BehaviorContext& ctx,
                                     const ScanRequest& request) const override {
    const double pi_len = ctx.params.require("pi_length_ns");
    std::vector<double> out;
    for (const Experiment& e : request.experiments)
      out.push_back(model_at(ctx, e.duration_ns, pi_len));
    return out;
  }

  RefitResult refit_target(const BehaviorContext& ctx, const ScanRequest& request,
                           const std::vector<double>& measured) const override {
    const double stored = ctx.params.require("pi_length_ns");
    auto model = [&](std::size_t i, double pi_len) {
      return model_at(ctx, request.experiments[i].duration_ns, pi_len);
    };
    // Half an amplified period each way keeps the peak assignment unique.
    const double quarter = 0.5 * stored / static_cast<double>(repeats_);
    RefitResult r =
        refit_scalar(measured, model, stored - quarter, stored + quarter, 96);
    r.shift -= stored;
    // Report the shift as a per-pulse rotation-angle error.
    r.shift = M_PI * r.shift / stored;
    return r;
  }

  CalibrationAnalysis analyze_calibrate(const BehaviorContext& ctx,
                                        const ScanRequest& request,
                                        const ScanData& data) const override {
    std::vector<double> t;
    for (const Experiment& e : request.experiments) t.push_back(e.duration_ns);
    const double center = ctx.params.require("pi_length_ns");

    CosineFitOptions opt;
    opt.fixed_phase = M_PI;  // P = 0.5 - 0.5 cos(N omega t)
    const double f_expected = repeats_ / (2.0 * center);
    opt.freq_lo = 0.85 * f_expected;
    opt.freq_hi = 1.18 * f_expected;
    // With the phase tied to t = 0 the SSE landscape oscillates with period
    // ~1/center in f; the dense pre-scan keeps the search off side minima.
    opt.candidates = 600;
    const CosineFit fit = fit_cosine(t, data.measured, opt);

    CalibrationAnalysis out;
    const double sigma_theta = M_PI * fit.sigma_frequency / fit.frequency;
    out.figures_of_merit = {{"rotation_angle_error_rad", sigma_theta},
                            {"contrast", 2.0 * fit.amplitude},
                            {"r_squared", fit.r_squared}};
    if (fit.amplitude < kMinContrast) {
      out.verdict = CalVerdict::BadData;
      out.detail = "amplified sequence shows no oscillation (amplitude " +
                   fmt_g(fit.amplitude) + ")";
      return out;
    }
    const long k = std::lround((2.0 * fit.frequency * center - 1.0) / 2.0);
    const double pi_len = (2.0 * std::max(k, 0L) + 1.0) / (2.0 * fit.frequency);
    out.params = {{"pi_length_ns", pi_len},
                  {"amp_contrast", fit.amplitude},
                  {"amp_offset", fit.offset}};
    const double tol = ctx.spec.tolerance.at("rotation_angle_error_rad");
    out.verdict =
        sigma_theta <= tol ? CalVerdict::Success : CalVerdict::OutOfTolerance;
    if (out.verdict != CalVerdict::Success)
      out.detail = "angle uncertainty " + fmt_g(sigma_theta) + " above " + fmt_g(tol);
    return out;
  }

 private:
  double model_at(const BehaviorContext& ctx, double duration, double pi_len) const {
    const double amp = resolve_or(ctx.params, "amp_contrast", 0.45);
    const double off = resolve_or(ctx.params, "amp_offset", 0.5);
    return off - amp * std::cos(repeats_ * M_PI * duration / pi_len);
  }

  int repeats_;
};

// ---------------------------------------------------------------------------
// two_qubit_phase: conditional-phase interaction time from a sweep of the
// joint-state probability. Depends on both qubits' fine cals; the qubit
// pair is taken from the two dependencies.
// ---------------------------------------------------------------------------
class TwoQubitPhaseBehavior : public NodeBehavior {
 public:
  std::string name() const override { return "two_qubit_phase"; }
  std::string primary_parameter() const override { return "cz_time_ns"; }
  std::string shift_fom_name() const override { return "cz_time_shift_ns"; }

  void validate_spec(const NodeSpec& spec) const override {
    NodeBehavior::validate_spec(spec);
    if (spec.dependencies.size() != 2)
      throw ConfigError("node '" + spec.id +
                        "': two_qubit_phase needs exactly two dependencies");
  }

  ScanRequest build_scan(ScanKind kind, const BehaviorContext& ctx) const override {
    const ScanTemplate& tmpl = kind == ScanKind::CheckData
                                   ? ctx.spec.check_data_scan
                                   : ctx.spec.calibrate_scan;
    ScanRequest req;
    req.node = ctx.spec.id;
    req.abscissa = tmpl.points;
    req.shots = tmpl.shots_per_point;

    const NodeId& dep_a = ctx.spec.dependencies[0];
    const NodeId& dep_b = ctx.spec.dependencies[1];
    const double pi_a = ctx.params.require_from(dep_a, "pi_length_ns");
    const double pi_b = ctx.params.require_from(dep_b, "pi_length_ns");
    const double drive_a = ctx.params.require_from(dep_a, "qubit_frequency_ghz");
    const double drive_b = ctx.params.require_from(dep_b, "qubit_frequency_ghz");
    const ReadoutModel ro_a = resolve_readout(ctx.params, dep_a);
    const ReadoutModel ro_b = resolve_readout(ctx.params, dep_b);
    const double cz =
        kind == ScanKind::CheckData ? ctx.params.require("cz_time_ns") : 0.0;

    for (double p : tmpl.points) {
      Experiment e;
      e.kind = ExperimentKind::JointPhase;
      e.qubit = qubit_label_of(dep_a);
      e.qubit_b = qubit_label_of(dep_b);
      e.interaction_time_ns = kind == ScanKind::CheckData ? p * cz : p;
      e.prep_a_ns = 0.5 * pi_a;
      e.prep_b_ns = 0.5 * pi_b;
      e.drive_a_ghz = drive_a;
      e.drive_b_ghz = drive_b;
      e.threshold = ro_a.threshold;
      e.threshold_b = ro_b.threshold;
      req.experiments.push_back(e);
    }
    return req;
  }

  std::vector<double> expected_curve(const BehaviorContext& ctx,
                                     const ScanRequest& request) const override {
    const double cz = ctx.params.require("cz_time_ns");
    std::vector<double> out;
    for (const Experiment& e : request.experiments)
      out.push_back(model_at(ctx, e.interaction_time_ns, cz));
    return out;
  }

  RefitResult refit_target(const BehaviorContext& ctx, const ScanRequest& request,
                           const std::vector<double>& measured) const override {
    const double stored = ctx.params.require("cz_time_ns");
    auto model = [&](std::size_t i, double cz) {
      return model_at(ctx, request.experiments[i].interaction_time_ns, cz);
    };
    RefitResult r =
        refit_scalar(measured, model, 0.65 * stored, 1.35 * stored, 128);
    r.shift -= stored;
    return r;
  }

  CalibrationAnalysis analyze_calibrate(const BehaviorContext& ctx,
                                        const ScanRequest& request,
                                        const ScanData& data) const override {
    const std::vector<double>& t = request.abscissa;
    CosineFitOptions opt;
    opt.fixed_phase = M_PI;
    const double span = t.back() - t.front();
    opt.freq_lo = 1.0 / (4.0 * span);
    opt.freq_hi = 1.0 / (2.0 * std::max(t[1] - t[0], 1e-9));
    opt.candidates = 512;
    const CosineFit fit = fit_cosine(t, data.measured, opt);

    CalibrationAnalysis out;
    const double cz = 1.0 / (2.0 * fit.frequency);
    const double sigma_cz = fit.sigma_frequency * cz / fit.frequency;
    out.figures_of_merit = {{"cz_time_shift_ns", sigma_cz},
                            {"contrast", 2.0 * fit.amplitude},
                            {"r_squared", fit.r_squared}};
    if (fit.amplitude < kMinContrast) {
      out.verdict = CalVerdict::BadData;
      out.detail = "joint oscillation lost (amplitude " + fmt_g(fit.amplitude) + ")";
      return out;
    }
    out.params = {{"cz_time_ns", cz},
                  {"phase_contrast", fit.amplitude},
                  {"phase_offset", fit.offset}};
    const double tol = ctx.spec.tolerance.at("cz_time_shift_ns");
    out.verdict = sigma_cz <= tol ? CalVerdict::Success : CalVerdict::OutOfTolerance;
    if (out.verdict != CalVerdict::Success)
      out.detail = "cz-time uncertainty " + fmt_g(sigma_cz) + " above " + fmt_g(tol);
    return out;
  }

 private:
  double model_at(const BehaviorContext& ctx, double t_int, double cz) const {
    const double amp = resolve_or(ctx.params, "phase_contrast", 0.4);
    const double off = resolve_or(ctx.params, "phase_offset", 0.5);
    return off - amp * std::cos(M_PI * t_int / cz);
  }
};

}  // namespace

// ---- shared pieces ----

const char* to_string(CheckClass c) {
  switch (c) {
    case CheckClass::InSpec: return "in_spec";
    case CheckClass::OutOfSpec: return "out_of_spec";
    case CheckClass::BadData: return "bad_data";
  }
  return "bad_data";
}

std::optional<double> ParamResolver::own(const std::string& name) const {
  return store_->params().get(node_, name);
}

std::optional<double> ParamResolver::find(const std::string& name) const {
  return find_from(node_, name);
}

std::optional<double> ParamResolver::find_from(const NodeId& start,
                                               const std::string& name) const {
  // Depth-first over the dependency chain, declaration order, nearest owner
  // first.
  std::vector<NodeId> stack{start};
  std::vector<NodeId> visited;
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    if (std::find(visited.begin(), visited.end(), cur) != visited.end()) continue;
    visited.push_back(cur);
    if (auto v = store_->params().get(cur, name)) return v;
    const auto& deps = graph_->node(cur).dependencies;
    for (auto it = deps.rbegin(); it != deps.rend(); ++it) stack.push_back(*it);
  }
  return std::nullopt;
}

double ParamResolver::require(const std::string& name) const {
  return require_from(node_, name);
}

double ParamResolver::require_from(const NodeId& start,
                                   const std::string& name) const {
  if (auto v = find_from(start, name)) return *v;
  throw MissingParameterError(start, name);
}

bool NodeBehavior::ready_to_check(const BehaviorContext& ctx) const {
  return ctx.params.own(primary_parameter()).has_value();
}

void NodeBehavior::validate_spec(const NodeSpec& spec) const {
  if (!spec.tolerance.count(shift_fom_name()))
    throw ConfigError("node '" + spec.id + "': behavior '" + name() +
                      "' needs a tolerance entry '" + shift_fom_name() + "'");
}

CheckDataOutcome NodeBehavior::analyze_check(const BehaviorContext& ctx,
                                             const ScanRequest& request,
                                             const ScanData& data) const {
  return classify_check_data(ctx, *this, request, data);
}

double shot_noise(const std::vector<double>& measured, int shots) {
  const double p = std::clamp(mean(measured), 0.0, 1.0);
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / std::max(shots, 1));
}

CheckDataOutcome classify_check_data(const BehaviorContext& ctx,
                                     const NodeBehavior& behavior,
                                     const ScanRequest& request,
                                     const ScanData& data) {
  const std::vector<double> expected = behavior.expected_curve(ctx, request);
  const RefitResult refit = behavior.refit_target(ctx, request, data.measured);
  const double noise = kNoiseSigmas * shot_noise(data.measured, data.shots);

  CheckDataOutcome out;
  out.figures_of_merit["residual_rms"] = refit.residual_rms;
  out.figures_of_merit["raw_residual_rms"] = rms_diff(data.measured, expected);
  if (refit.residual_rms > noise) {
    out.classification = CheckClass::BadData;
    out.detail = "residual " + fmt_g(refit.residual_rms) + " above noise " +
                 fmt_g(noise);
    return out;
  }
  const double tol = ctx.spec.tolerance.at(behavior.shift_fom_name());
  out.figures_of_merit[behavior.shift_fom_name()] = std::fabs(refit.shift);
  if (std::fabs(refit.shift) <= tol) {
    out.classification = CheckClass::InSpec;
  } else {
    out.classification = CheckClass::OutOfSpec;
    out.fitted_shift = refit.shift;
    out.detail = "shift " + fmt_g(refit.shift) + " beyond " + fmt_g(tol);
  }
  return out;
}

std::string qubit_label_of(const NodeId& id) {
  auto dot = id.rfind('.');
  if (dot == std::string::npos || dot + 1 >= id.size())
    throw Error("node id '" + id + "' has no qubit label suffix");
  return id.substr(dot + 1);
}

BehaviorRegistry default_behavior_registry() {
  BehaviorRegistry reg;
  reg["readout_threshold"] = std::make_shared<ReadoutThresholdBehavior>();
  reg["spectroscopy"] = std::make_shared<SpectroscopyBehavior>();
  reg["rabi_coarse"] = std::make_shared<RabiDurationBehavior>();
  reg["rabi_fine"] = std::make_shared<RabiAmplifiedBehavior>();
  reg["two_qubit_phase"] = std::make_shared<TwoQubitPhaseBehavior>();
  return reg;
}

}  // namespace optimus
