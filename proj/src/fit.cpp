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

#include "optimus/fit.hpp"

#include <cmath>
#include <limits>

#include "optimus/errors.hpp"

namespace optimus {

namespace {

constexpr double kGolden = 0.6180339887498949;

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Solves the k x k normal equations A c = b in place (k <= 3), plain
// Gaussian elimination with partial pivoting.
bool solve_small(double a[3][3], double b[3], double c[3], int k) {
  int piv[3] = {0, 1, 2};
  for (int col = 0; col < k; ++col) {
    int best = col;
    for (int r = col + 1; r < k; ++r)
      if (std::fabs(a[piv[r]][col]) > std::fabs(a[piv[best]][col])) best = r;
    std::swap(piv[col], piv[best]);
    const double d = a[piv[col]][col];
    if (std::fabs(d) < 1e-300) return false;
    for (int r = col + 1; r < k; ++r) {
      const double m = a[piv[r]][col] / d;
      for (int cc = col; cc < k; ++cc) a[piv[r]][cc] -= m * a[piv[col]][cc];
      b[piv[r]] -= m * b[piv[col]];
    }
  }
  for (int row = k - 1; row >= 0; --row) {
    double acc = b[piv[row]];
    for (int cc = row + 1; cc < k; ++cc) acc -= a[piv[row]][cc] * c[cc];
    c[row] = acc / a[piv[row]][row];
  }
  return true;
}

struct LinearCosine {
  double offset = 0.0, amplitude = 0.0, phase = 0.0, sse = 0.0;
};

// Best offset/amplitude/phase for a fixed frequency. With a fixed phase the
// basis is {1, cos(2 pi f x + p0)}; otherwise {1, cos, sin}.
LinearCosine solve_cosine_at(const std::vector<double>& x,
                             const std::vector<double>& y, double freq,
                             const std::optional<double>& fixed_phase) {
  const std::size_t n = x.size();
  LinearCosine out;
  if (fixed_phase) {
    double a[3][3] = {}, b[3] = {}, c[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
      const double ci = std::cos(2.0 * M_PI * freq * x[i] + *fixed_phase);
      a[0][0] += 1.0;
      a[0][1] += ci;
      a[1][1] += ci * ci;
      b[0] += y[i];
      b[1] += ci * y[i];
    }
    a[1][0] = a[0][1];
    if (!solve_small(a, b, c, 2)) {
      out.sse = std::numeric_limits<double>::infinity();
      return out;
    }
    out.offset = c[0];
    out.amplitude = c[1];
    out.phase = *fixed_phase;
    for (std::size_t i = 0; i < n; ++i) {
      const double r =
          y[i] - (c[0] + c[1] * std::cos(2.0 * M_PI * freq * x[i] + *fixed_phase));
      out.sse += r * r;
    }
    return out;
  }
  double a[3][3] = {}, b[3] = {}, c[3] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const double ci = std::cos(2.0 * M_PI * freq * x[i]);
    const double si = std::sin(2.0 * M_PI * freq * x[i]);
    a[0][0] += 1.0;
    a[0][1] += ci;
    a[0][2] += si;
    a[1][1] += ci * ci;
    a[1][2] += ci * si;
    a[2][2] += si * si;
    b[0] += y[i];
    b[1] += ci * y[i];
    b[2] += si * y[i];
  }
  a[1][0] = a[0][1];
  a[2][0] = a[0][2];
  a[2][1] = a[1][2];
  if (!solve_small(a, b, c, 3)) {
    out.sse = std::numeric_limits<double>::infinity();
    return out;
  }
  out.offset = c[0];
  out.amplitude = std::hypot(c[1], c[2]);
  out.phase = std::atan2(-c[2], c[1]);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (c[0] + c[1] * std::cos(2.0 * M_PI * freq * x[i]) +
                             c[2] * std::sin(2.0 * M_PI * freq * x[i]));
    out.sse += r * r;
  }
  return out;
}

double total_variance(const std::vector<double>& y) {
  const double mean = sum(y) / static_cast<double>(y.size());
  double sst = 0.0;
  for (double v : y) sst += (v - mean) * (v - mean);
  return sst;
}

void fill_stats(FitStats& stats, double sse, const std::vector<double>& y) {
  stats.residual_rms = std::sqrt(sse / static_cast<double>(y.size()));
  const double sst = total_variance(y);
  stats.r_squared = sst > 1e-15 ? 1.0 - sse / sst : 0.0;
}

// Statistical uncertainty of a scanned parameter from the curvature of the
// sum of squares: sigma^2 = 2 sigma_y^2 / SSE''(best).
double curvature_sigma(const std::function<double(double)>& sse_at, double best,
                       double scale, double sse_best, std::size_t n, int dof) {
  const double h = std::max(std::fabs(best), scale) * 1e-5;
  if (h <= 0.0) return 0.0;
  const double second =
      (sse_at(best + h) - 2.0 * sse_best + sse_at(best - h)) / (h * h);
  if (!(second > 0.0)) return std::numeric_limits<double>::infinity();
  const long denom = static_cast<long>(n) > dof ? static_cast<long>(n) - dof : 1;
  const double sigma_y2 = sse_best / static_cast<double>(denom);
  return std::sqrt(2.0 * sigma_y2 / second);
}

}  // namespace

double golden_minimize(const std::function<double(double)>& f, double lo,
                       double hi, int max_iterations, int* iterations) {
  if (!(hi > lo)) throw FitPreconditionError("empty search bracket");
  const double tol = 1e-12 * (std::fabs(lo) + std::fabs(hi)) + 1e-15;
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int iter = 0;
  while (b - a > tol) {
    if (++iter > max_iterations)
      throw FitDivergedError("no convergence after " +
                             std::to_string(max_iterations) + " iterations");
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  if (iterations) *iterations = iter;
  return 0.5 * (a + b);
}

double scan_then_golden(const std::function<double(double)>& f, double lo,
                        double hi, int candidates, int max_iterations,
                        int* iterations) {
  if (candidates < 3) return golden_minimize(f, lo, hi, max_iterations, iterations);
  double best = lo;
  double best_val = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < candidates; ++i) {
    const double v = lo + (hi - lo) * i / (candidates - 1);
    const double fv = f(v);
    if (fv < best_val) {
      best_val = fv;
      best = v;
      best_i = i;
    }
  }
  const double step = (hi - lo) / (candidates - 1);
  const double a = best_i == 0 ? lo : best - step;
  const double b = best_i == candidates - 1 ? hi : best + step;
  return golden_minimize(f, a, b, max_iterations, iterations);
}

CosineFit fit_cosine(const std::vector<double>& x, const std::vector<double>& y,
                     CosineFitOptions options) {
  if (x.size() != y.size()) throw FitPreconditionError("x/y size mismatch");
  if (x.size() < 5) throw FitPreconditionError("need at least 5 points");
  if (!(options.freq_hi > options.freq_lo) || options.freq_lo <= 0.0)
    throw FitPreconditionError("bad frequency bracket");

  auto sse_at = [&](double f) {
    return solve_cosine_at(x, y, f, options.fixed_phase).sse;
  };
  int iters = 0;
  const double f_best = scan_then_golden(sse_at, options.freq_lo, options.freq_hi,
                                         options.candidates,
                                         options.max_iterations, &iters);
  const LinearCosine lin = solve_cosine_at(x, y, f_best, options.fixed_phase);

  CosineFit fit;
  fit.offset = lin.offset;
  fit.amplitude = lin.amplitude;
  fit.frequency = f_best;
  fit.phase = lin.phase;
  fit.iterations = iters;
  fill_stats(fit, lin.sse, y);
  fit.sigma_frequency = curvature_sigma(sse_at, f_best, options.freq_hi,
                                        lin.sse, x.size(),
                                        options.fixed_phase ? 3 : 4);
  return fit;
}

CosineFit fit_cosine(const std::vector<double>& x, const std::vector<double>& y,
                     const CosineGuess& guess, int max_iterations) {
  if (guess.frequency <= 0.0)
    throw FitPreconditionError("guess frequency must be positive");
  CosineFitOptions options;
  options.freq_lo = 0.6 * guess.frequency;
  options.freq_hi = 1.5 * guess.frequency;
  options.candidates = 64;
  options.max_iterations = max_iterations;
  return fit_cosine(x, y, options);
}

LorentzianFit fit_lorentzian(const std::vector<double>& x,
                             const std::vector<double>& y,
                             LorentzianFitOptions options) {
  if (x.size() != y.size()) throw FitPreconditionError("x/y size mismatch");
  if (x.size() < 5) throw FitPreconditionError("need at least 5 points");
  if (!(options.center_hi > options.center_lo))
    throw FitPreconditionError("bad center bracket");
  if (!(options.width_hi > options.width_lo) || options.width_lo <= 0.0)
    throw FitPreconditionError("bad width bracket");

  struct Linear {
    double bg = 0.0, amp = 0.0, sse = 0.0;
  };
  auto solve_at = [&](double center, double width) {
    Linear out;
    double a[3][3] = {}, b[3] = {}, c[3] = {};
    const double w2 = width * width;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double li = w2 / (w2 + (x[i] - center) * (x[i] - center));
      a[0][0] += 1.0;
      a[0][1] += li;
      a[1][1] += li * li;
      b[0] += y[i];
      b[1] += li * y[i];
    }
    a[1][0] = a[0][1];
    if (!solve_small(a, b, c, 2)) {
      out.sse = std::numeric_limits<double>::infinity();
      return out;
    }
    out.bg = c[0];
    out.amp = c[1];
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double li = w2 / (w2 + (x[i] - center) * (x[i] - center));
      const double r = y[i] - (c[0] + c[1] * li);
      out.sse += r * r;
    }
    return out;
  };

  // Start at the tallest sample and the geometric-mean width.
  std::size_t peak_i = 0;
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i] > y[peak_i]) peak_i = i;
  double center = std::min(std::max(x[peak_i], options.center_lo), options.center_hi);
  double width = std::sqrt(options.width_lo * options.width_hi);

  int total_iters = 0;
  for (int round = 0; round < options.rounds; ++round) {
    int it = 0;
    auto sse_center = [&](double c) { return solve_at(c, width).sse; };
    center = scan_then_golden(sse_center, options.center_lo, options.center_hi,
                              round == 0 ? 128 : 0, options.max_iterations, &it);
    total_iters += it;
    auto sse_logw = [&](double lw) { return solve_at(center, std::exp(lw)).sse; };
    const double lw = golden_minimize(sse_logw, std::log(options.width_lo),
                                      std::log(options.width_hi),
                                      options.max_iterations, &it);
    width = std::exp(lw);
    total_iters += it;
  }

  const Linear lin = solve_at(center, width);
  LorentzianFit fit;
  fit.background = lin.bg;
  fit.amplitude = lin.amp;
  fit.center = center;
  fit.width = width;
  fit.iterations = total_iters;
  fill_stats(fit, lin.sse, y);
  auto sse_center = [&](double c) { return solve_at(c, width).sse; };
  fit.sigma_center =
      curvature_sigma(sse_center, center, width, lin.sse, x.size(), 4);
  return fit;
}

}  // namespace optimus
