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

#include <cmath>
#include <cstdint>
#include <random>

namespace optimus {

/// Deterministic RNG with hand-rolled distributions. Standard-library
/// distributions are implementation-defined, which would make golden logs
/// fragile; the draw sequence here is fixed by construction.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the spare value is discarded so one
  /// call always consumes exactly two uniforms.
  double gaussian() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Binomial as an explicit Bernoulli count: exact, portable, and O(n).
  long binomial(long n, double p) {
    long count = 0;
    for (long i = 0; i < n; ++i)
      if (uniform() < p) ++count;
    return count;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace optimus
