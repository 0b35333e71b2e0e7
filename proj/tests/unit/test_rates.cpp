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

#include "cfmimo/geometry.hpp"
#include "cfmimo/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace cfmimo;

namespace
{

RateScenario single(std::size_t draws = 1000)
{
    RateScenario s;
    s.num_users = 1;
    s.tau_p = 1;
    s.tau_c = 2;
    s.pilot_power_mw = 1.0;
    s.data_power_mw = 1.0;
    s.dl_power_mw = 1.0;
    s.fading_draws = draws;
    return s;
}

LargeScaleProfile constant_profile(Eigen::Index L, Eigen::Index K, double beta)
{
    LargeScaleProfile p;
    p.beta = Eigen::MatrixXd::Constant(L, K, beta);
    return p;
}

// Exponential integral E1(x) from its convergent series
double expint_e1(double x)
{
    double sum = 0.0, term = 1.0;
    for (int k = 1; k < 60; ++k)
    {
        term *= -x / k;
        sum += term / k;
    }
    return -0.57721566490153286 - std::log(x) - sum;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

} // namespace

TEST_CASE("scenario validation")
{
    RateScenario s;
    CHECK_NOTHROW(s.validate());
    CHECK(s.tau_d() == 480);
    s.tau_p = 10;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = RateScenario{};
    s.tau_c = 20;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = RateScenario{};
    s.data_power_mw = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("estimation quality")
{
    RateScenario s = single();
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    CHECK(estimation_gamma(one, s)(0, 0) == doctest::Approx(0.5));

    Eigen::MatrixXd beta(3, 1);
    beta << 1e-6, 1e-3, 0.5;
    double prev_ratio = -1.0;
    for (double rho : {0.1, 1.0, 10.0, 100.0, 1e4})
    {
        s.pilot_power_mw = rho;
        const auto g = estimation_gamma(beta, s);
        CHECK((g.array() < beta.array()).all());
        CHECK((g.array() > 0.0).all());
        const double ratio = g(1, 0) / beta(1, 0);
        CHECK(ratio > prev_ratio);
        prev_ratio = ratio;
    }
    s.pilot_power_mw = 1e12;
    CHECK(estimation_gamma(beta, s)(2, 0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("MMSE estimate")
{
    Rng rng(1);
    RateScenario s;
    LargeScaleProfile p = constant_profile(1, 20, 0.02);
    const RateSimulator sim(p, s);

    // Orthogonality of the estimate and its error, and E|g_hat|^2 = gamma
    const int n = 100000 / 20;
    std::complex<double> corr = 0.0;
    double c2 = 0.0, pw = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const auto d = sim.draw(rng);
        for (Eigen::Index k = 0; k < 20; ++k)
        {
            const auto v = std::conj(d.g_hat(0, k)) * (d.g(0, k) - d.g_hat(0, k));
            corr += v;
            c2 += std::norm(v);
            pw += std::norm(d.g_hat(0, k));
        }
    }
    const double m = n * 20.0;
    const double se = std::sqrt(c2 / m / m);
    CHECK(std::abs(corr.real() / m) < 3 * se);
    CHECK(std::abs(corr.imag() / m) < 3 * se);
    CHECK(pw / m == doctest::Approx(sim.gamma()(0, 0)).epsilon(0.02));

    // Large pilot power: the estimate approaches the channel
    RateScenario big = single();
    big.pilot_power_mw = 1e12;
    Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(4, 1, 0.3);
    Eigen::MatrixXcd g = draw_fading(4, 1, rng) * std::sqrt(0.3);
    Eigen::MatrixXcd w = draw_fading(4, 1, rng);
    CHECK((mmse_estimate(beta, big, g, w) - g).norm() < 1e-5);
    CHECK_THROWS_AS(mmse_estimate(beta, big, g, Eigen::MatrixXcd(3, 1)), std::invalid_argument);
}

TEST_CASE("uplink UatF")
{
    RateScenario s = single();
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    CHECK(ul_rate_uatf(one, one, s, 0) == doctest::Approx(std::log2(1.5)));
    CHECK(std::log2(1.5) == doctest::Approx(0.585).epsilon(1e-3));
    CHECK_THROWS_AS(ul_rate_uatf(one, one, s, 1), std::out_of_range);
}

TEST_CASE("downlink power allocation")
{
    Eigen::MatrixXd g = Eigen::MatrixXd::Constant(4, 1, 0.2);
    const auto p = dl_power_alloc(g, 100.0, 0);
    for (Eigen::Index m = 0; m < 4; ++m)
        CHECK(p(m) == doctest::Approx(25.0));

    Eigen::MatrixXd h(2, 1);
    h << 3.0, 1.0;
    const auto q = dl_power_alloc(h, 100.0, 0);
    CHECK(q(0) == doctest::Approx(75.0));
    CHECK(q(1) == doctest::Approx(25.0));

    Rng rng(2);
    Eigen::MatrixXd r(50, 7);
    for (Eigen::Index i = 0; i < r.size(); ++i)
        r.data()[i] = std::exp(-15 * rng.uniform());
    const auto all = dl_power_alloc(r, 100.0);
    for (Eigen::Index k = 0; k < 7; ++k)
        CHECK(all.col(k).sum() == doctest::Approx(100.0).epsilon(1e-13));

    CHECK_THROWS_AS(dl_power_alloc(h, -1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(dl_power_alloc(Eigen::MatrixXd::Zero(2, 1), 1.0, 0), std::invalid_argument);
}

TEST_CASE("downlink UatF")
{
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    CHECK(dl_rate_uatf(one, one, dl_power_alloc(one, 1.0), 0) == doctest::Approx(std::log2(1.5)));
    CHECK(dl_rate_uatf(one, one, dl_power_alloc(one, 0.0), 0) == 0.0);
}

TEST_CASE("perfect-CSI rate with one antenna and one user")
{
    // E[log2(1 + |h|^2)] = e E1(1) / ln 2
    const double oracle = std::exp(1.0) * expint_e1(1.0) / std::log(2.0);
    CHECK(expint_e1(1.0) == doctest::Approx(0.219383934).epsilon(1e-8));

    Rng rng(3);
    const auto p = constant_profile(1, 1, 1.0);
    const auto res = RateSimulator(p, single(1000000)).run(rng);
    const auto &ul = res.ul_perfect[0];
    CHECK(std::abs(ul.value - oracle) < 3 * ul.std_error);
    CHECK(ul.value == doctest::Approx(oracle).epsilon(0.005));
    CHECK(ul.converged);
}

TEST_CASE("general bounds approach perfect CSI in their limits")
{
    Rng rng(4);
    LargeScaleProfile p;
    p.beta.resize(8, 3);
    for (Eigen::Index i = 0; i < p.beta.size(); ++i)
        p.beta.data()[i] = std::exp(-8 * rng.uniform());

    RateScenario s;
    s.num_users = 3;
    s.tau_p = 3;
    s.fading_draws = 4000;
    s.pilot_power_mw = 1e10;
    Rng a(5);
    const auto strong = RateSimulator(p, s).run(a);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(strong.ul_general[k].value == doctest::Approx(strong.ul_perfect[k].value).epsilon(1e-3));

    // Long data phase: the downlink penalty vanishes
    s.pilot_power_mw = 100.0;
    Rng b(6), c(6);
    const auto short_block = RateSimulator(p, s).run(b);
    s.tau_c = 100000000;
    const auto long_block = RateSimulator(p, s).run(c);
    for (std::size_t k = 0; k < 3; ++k)
    {
        CHECK(long_block.dl_general[k].penalty < short_block.dl_general[k].penalty);
        CHECK(long_block.dl_general[k].penalty < 1e-5);
        CHECK(long_block.dl_general[k].rate.value ==
              doctest::Approx(long_block.dl_perfect[k].value).epsilon(1e-4));
        CHECK(short_block.dl_general[k].first_term == short_block.dl_perfect[k].value);
    }
}

TEST_CASE("free functions match the simulator")
{
    Rng rng(7);
    const auto p = constant_profile(5, 2, 0.01);
    RateScenario s;
    s.num_users = 2;
    s.tau_p = 2;
    s.fading_draws = 200;
    Rng a(8), b(8), c(8);
    const auto all = RateSimulator(p, s).run(a);
    CHECK(ul_rate_general(p, s, 1, b).value == all.ul_general[1].value);
    CHECK(dl_rate_general(p, s, 0, c).rate.value == all.dl_general[0].rate.value);
    CHECK_THROWS_AS(RateSimulator(constant_profile(5, 3, 0.01), s), std::invalid_argument);
    CHECK_THROWS_AS(RateSimulator(constant_profile(0, 2, 0.01), s), std::invalid_argument);
}

TEST_CASE("too few draws are flagged")
{
    Rng rng(9);
    LargeScaleProfile p = constant_profile(2, 2, 1e-6);
    RateScenario s;
    s.num_users = 2;
    s.tau_p = 2;
    s.fading_draws = 2;
    s.max_relative_stderr = 1e-6;
    const auto r = RateSimulator(p, s).run(rng);
    CHECK_FALSE(r.ul_general[0].converged);
}

TEST_CASE("bound ordering in the Table I scenario")
{
    RateScenario s; // K = 20, tau_p = 20, tau_c = 500, 100 mW
    s.fading_draws = 300;
    const auto region = Region::square(1000.0);
    const auto model = PropagationModel::three_slope(10.0, 50.0, constant_c_db(1900.0, 15.0, 1.65));
    std::vector<double> ul_u, ul_g, ul_p, dl_u, dl_g, dl_p;
    for (std::uint64_t t = 0; t < 4; ++t)
    {
        Rng rng = Rng::derive(10, {t});
        const auto real = sample_uniform_fixed(region, 100, 1, rng);
        std::vector<Point2> users(20);
        for (auto &u : users)
            u = region.sample_point(rng);
        const auto res = RateSimulator(large_scale_profile(real, users, model, rng), s).run(rng);
        for (std::size_t k = 0; k < 20; ++k)
        {
            CHECK(res.ul_uatf[k] <= res.ul_perfect[k].value + 3 * res.ul_perfect[k].std_error);
            CHECK(res.dl_uatf[k] <= res.dl_perfect[k].value + 3 * res.dl_perfect[k].std_error);
            ul_u.push_back(res.ul_uatf[k]);
            ul_g.push_back(res.ul_general[k].value);
            ul_p.push_back(res.ul_perfect[k].value);
            dl_u.push_back(res.dl_uatf[k]);
            dl_g.push_back(res.dl_general[k].rate.value);
            dl_p.push_back(res.dl_perfect[k].value);
        }
    }
    CHECK(median(ul_u) < median(ul_g));
    CHECK(median(ul_g) <= median(ul_p) * 1.03);
    CHECK(median(dl_u) < median(dl_g));
    CHECK(median(dl_g) < median(dl_p));
}
