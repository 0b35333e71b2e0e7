// SPDX-License-Identifier: Apache-2.0
//
// cfmimo - stochastic-geometry toolkit for cell-free Massive MIMO
// Copyright (C) 2026 The cfmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CFMIMO_RANDOM_HPP
#define CFMIMO_RANDOM_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace cfmimo
{

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed and a tuple of counters (parameter set, trial, ...).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Random stream owned by exactly one worker.
///
/// Streams are derived by counter-splitting a master seed, so the values a
/// trial sees depend only on (seed, counters) and never on scheduling.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed);

    /// Stream for the given counters under `master_seed`.
    static Rng derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> counters);

    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double normal();                       // N(0, 1)
    double exponential();                  // Exp(1)
    std::uint64_t poisson(double mean);    // mean >= 0
    double gamma_int(unsigned shape);      // Gamma(shape, 1) as a sum of `shape` Exp(1)
    std::complex<double> complex_normal(); // CN(0, 1)

    std::mt19937_64 &engine() noexcept { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace cfmimo

#endif
