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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cfmimo/channel.hpp"
#include "cfmimo/metrics.hpp"

#include <cmath>
#include <vector>

using namespace cfmimo;

namespace
{

LargeScaleProfile column_profile(const std::vector<double> &beta, unsigned n)
{
    LargeScaleProfile p;
    p.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    p.n_per_ap = n;
    return p;
}

} // namespace

TEST_CASE("Rayleigh fading moments")
{
    Rng rng(1);
    const auto h = draw_fading(1000, 1000, rng); // 10^6 entries
    const Eigen::ArrayXXd p = h.cwiseAbs2().array();
    const double mean = p.mean();
    const double var = (p - mean).square().mean();
    CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
    CHECK(h.real().array().square().mean() == doctest::Approx(0.5).epsilon(0.02));
    CHECK(h.imag().array().square().mean() == doctest::Approx(0.5).epsilon(0.02));
    CHECK(draw_fading(0, 3, rng).size() == 0);
}

TEST_CASE("channel gain examples")
{
    const auto p = column_profile({0.04}, 1);
    CHECK(channel_gain(p, Eigen::VectorXd::Constant(1, 2.5), 0) == doctest::Approx(0.1));

    const auto q = column_profile({0.3, 0.2, 0.1}, 4);
    CHECK(channel_gain(q, Eigen::VectorXd::Constant(3, 4.0), 0) ==
          doctest::Approx(conditional_moments(q, 0).mean));

    LargeScaleProfile empty;
    empty.beta.resize(0, 1);
    CHECK(channel_gain(empty, Eigen::VectorXd(0), 0) == 0.0);
    CHECK_THROWS_AS(conditional_moments(empty, 0), std::invalid_argument);
}

TEST_CASE("conditional moments")
{
    auto m = conditional_moments(column_profile({1.0, 1.0}, 1), 0);
    CHECK(m.mean == 2.0);
    CHECK(m.variance == 2.0);
    m = conditional_moments(column_profile({0.5}, 4), 0);
    CHECK(m.mean == 2.0);
    CHECK(m.variance == 1.0);
}

TEST_CASE("per-AP gamma contributions have Gamma(N, beta) moments")
{
    Rng rng(2);
    const double beta = 0.3;
    const unsigned N = 6;
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const double v = draw_gamma_sums(1, N, rng)(0) * beta;
        s += v;
        s2 += v * v;
    }
    const double mean = s / n;
    CHECK(mean == doctest::Approx(N * beta).epsilon(0.01));
    CHECK(s2 / n - mean * mean == doctest::Approx(N * beta * beta).epsilon(0.03));
}

TEST_CASE("per-antenna and Gamma-sum paths agree exactly")
{
    Rng rng(3);
    LargeScaleProfile p;
    p.n_per_ap = 3;
    p.beta.resize(4, 2);
    p.beta << 0.1, 0.2, 0.05, 0.4, 1e-3, 0.01, 0.7, 0.3;
    const auto draw = make_channel(p, draw_fading(p.num_antennas(), 2, rng));
    for (std::size_t k = 0; k < 2; ++k)
    {
        const auto H = gamma_sums_from_fading(draw.h, 3, k);
        CHECK(channel_gain(p, H, k) == doctest::Approx(channel_gain(draw, k)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(make_channel(p, draw_fading(5, 2, rng)), std::invalid_argument);
    CHECK_THROWS_AS(gamma_sums_from_fading(draw.h, 5, 0), std::invalid_argument);
}

TEST_CASE("hypoexponential CDF")
{
    const double one[] = {2.0};
    for (double x : {0.1, 1.0, 3.0})
        CHECK(hypoexp_cdf(one, x) == doctest::Approx(1.0 - std::exp(-2.0 * x)));

    const double two[] = {1.0, 2.0};
    CHECK(hypoexp_cdf(two, 0.0) == 0.0);
    CHECK(hypoexp_cdf(two, -1.0) == 0.0);
    CHECK(hypoexp_cdf(two, INFINITY) == 1.0);
    CHECK(hypoexp_cdf(two, 1e6) == doctest::Approx(1.0));
    // Convolution of Exp(1) and Exp(2)
    const double expect = 2.0 * (1.0 - std::exp(-1.0)) - (1.0 - std::exp(-2.0));
    CHECK(expect == doctest::Approx(0.3996).epsilon(1e-4));
    CHECK(hypoexp_cdf(two, 1.0) == doctest::Approx(expect).epsilon(1e-12));

    // Monte-Carlo cross-check with 10^6 samples
    Rng rng(4);
    int hits = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
        hits += (rng.exponential() + 0.5 * rng.exponential() <= 1.0) ? 1 : 0;
    CHECK(static_cast<double>(hits) / n == doctest::Approx(expect).epsilon(0.005));

    const double dup[] = {1.0, 1.0 + 1e-12};
    CHECK_THROWS_AS(hypoexp_cdf(dup, 1.0), NearDuplicateRates);
    const double bad[] = {1.0, -1.0};
    CHECK_THROWS_AS(hypoexp_cdf(bad, 1.0), std::invalid_argument);
}

TEST_CASE("hypoexponential matches simulated channel gains")
{
    Rng rng(5);
    const std::vector<double> beta{1.0, 0.4, 0.15, 0.06, 0.02};
    const auto p = column_profile(beta, 1);
    std::vector<double> rates;
    for (double b : beta)
        rates.push_back(1.0 / b);
    std::vector<double> s(100000);
    for (auto &v : s)
        v = channel_gain(p, draw_gamma_sums(beta.size(), 1, rng), 0);
    const double ks = ks_distance(EmpiricalCdf(s), [&](double x) { return hypoexp_cdf(rates, x); });
    CHECK(ks < 0.01);
}
