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

#include <functional>
#include <optional>
#include <vector>

namespace optimus {

/// Common fit statistics. residual_rms is in probability units; r_squared
/// is 1 - SSE/SST (0 when the data carries no variance).
struct FitStats {
  double residual_rms = 0.0;
  double r_squared = 0.0;
  int iterations = 0;
};

/// Deterministic 1-D minimizer: golden-section search on [lo, hi]. Throws
/// FitDivergedError if the bracket has not shrunk to tolerance within
/// max_iterations. `iterations`, when given, receives the count used.
double golden_minimize(const std::function<double(double)>& f, double lo,
                       double hi, int max_iterations = 200,
                       int* iterations = nullptr);

/// Evaluates `f` on `candidates` evenly spaced points of [lo, hi], then
/// golden-searches the bracket around the best candidate. Used when the
/// objective has several local minima (e.g. frequency fits with a tied
/// phase, where the landscape oscillates).
double scan_then_golden(const std::function<double(double)>& f, double lo,
                        double hi, int candidates, int max_iterations = 200,
                        int* iterations = nullptr);

struct CosineFit : FitStats {
  double offset = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;  // cycles per abscissa unit
  double phase = 0.0;      // radians
  double sigma_frequency = 0.0;  // statistical, from SSE curvature
};

struct CosineGuess {
  double frequency = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double phase = 0.0;
};

struct CosineFitOptions {
  double freq_lo = 0.0;
  double freq_hi = 0.0;
  std::optional<double> fixed_phase;  // when set, phase is not fitted
  int candidates = 0;                 // pre-scan grid (0 = golden only)
  int max_iterations = 200;
};

/// Least-squares fit of y = offset + amplitude * cos(2 pi f x + phase).
/// For each trial frequency the remaining parameters are solved linearly,
/// so only the frequency is searched. Deterministic for identical inputs.
/// Requires at least 5 points.
CosineFit fit_cosine(const std::vector<double>& x, const std::vector<double>& y,
                     CosineFitOptions options);

/// Spec'd convenience form: searches around the guessed frequency with a
/// free phase.
CosineFit fit_cosine(const std::vector<double>& x, const std::vector<double>& y,
                     const CosineGuess& guess, int max_iterations = 200);

struct LorentzianFit : FitStats {
  double background = 0.0;
  double amplitude = 0.0;  // peak height above background
  double center = 0.0;
  double width = 0.0;  // half width at half maximum
  double sigma_center = 0.0;
};

struct LorentzianFitOptions {
  double center_lo = 0.0;
  double center_hi = 0.0;
  double width_lo = 0.0;
  double width_hi = 0.0;
  int rounds = 4;  // alternating center/width refinements
  int max_iterations = 200;
};

/// Least-squares fit of y = background + amplitude * w^2 / (w^2 + (x-c)^2)
/// by alternating 1-D searches over center and width with linear solves for
/// background and amplitude.
LorentzianFit fit_lorentzian(const std::vector<double>& x,
                             const std::vector<double>& y,
                             LorentzianFitOptions options);

}  // namespace optimus
