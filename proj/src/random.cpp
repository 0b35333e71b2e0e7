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

#include "cfmimo/random.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmimo
{

Rng::Rng(std::uint64_t seed)
{
    // Expand the 64-bit seed so nearby seeds give unrelated engine states
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(splitmix64(seed)),
                      static_cast<std::uint32_t>(splitmix64(seed) >> 32)};
    engine_.seed(seq);
}

Rng Rng::derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> counters)
{
    std::uint64_t h = splitmix64(master_seed);
    for (auto c : counters)
        h = splitmix64(h ^ splitmix64(c + 0x632BE59BD9B4E019ULL));
    return Rng(h);
}

double Rng::uniform()
{
    // 53 random bits -> [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

double Rng::normal()
{
    return normal_(engine_);
}

double Rng::exponential()
{
    // 1 - u lies in (0, 1], so the log is finite
    return -std::log1p(-uniform());
}

std::uint64_t Rng::poisson(double mean)
{
    if (!(mean >= 0.0))
        throw std::invalid_argument("Poisson mean must be non-negative.");
    if (mean == 0.0)
        return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(engine_);
}

double Rng::gamma_int(unsigned shape)
{
    double s = 0.0;
    for (unsigned i = 0; i < shape; ++i)
        s += exponential();
    return s;
}

std::complex<double> Rng::complex_normal()
{
    constexpr double scale = 0.70710678118654752440; // 1/sqrt(2)
    const double re = normal();
    const double im = normal();
    return {scale * re, scale * im};
}

} // namespace cfmimo
