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

#include "cfmimo/analytics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cfmimo
{

namespace
{

constexpr double kAlphaTwoTolerance = 1e-6;

bool is_free_space(double alpha)
{
    return std::abs(alpha - 2.0) < kAlphaTwoTolerance;
}

void check_inputs(double lambda, double alpha, double rho)
{
    if (alpha == 1.0)
        throw std::invalid_argument("alpha = 1 is not supported (the variance integral changes form).");
    if (!(alpha > 1.0))
        throw std::invalid_argument("Pathloss exponent must be > 1.");
    if (!(rho >= 1.0))
        throw std::invalid_argument("Network radius must be >= 1 m.");
    if (!(lambda >= 0.0))
        throw std::invalid_argument("AP intensity must be non-negative.");
}

// 2 * int_0^rho l(r) r dr  (per unit pi)
double first_order_integral(double alpha, double rho)
{
    if (is_free_space(alpha))
        return 1.0 + 2.0 * std::log(rho);
    return 1.0 + 2.0 * (1.0 - std::pow(rho, 2.0 - alpha)) / (alpha - 2.0);
}

// 2 * int_0^rho l(r)^2 r dr  (per unit pi)
double second_order_integral(double alpha, double rho)
{
    return 1.0 + (1.0 - std::pow(rho, 2.0 - 2.0 * alpha)) / (alpha - 1.0);
}

} // namespace

GainMoments lemma1_moments(double lambda_per_m2, unsigned n_per_ap, double alpha, double rho_m)
{
    check_inputs(lambda_per_m2, alpha, rho_m);
    if (n_per_ap == 0)
        throw std::invalid_argument("Number of antennas per AP must be positive.");

    const double n = n_per_ap;
    const double lp = lambda_per_m2 * std::numbers::pi;
    return {n * lp * first_order_integral(alpha, rho_m), (n * n + n) * lp * second_order_integral(alpha, rho_m)};
}

SumMoments lemma2_moments(double lambda_per_m2, double alpha, double rho_m)
{
    check_inputs(lambda_per_m2, alpha, rho_m);

    const double lp = lambda_per_m2 * std::numbers::pi;
    SumMoments m;
    m.mean_y1 = lp * first_order_integral(alpha, rho_m);
    m.var_y1 = lp * second_order_integral(alpha, rho_m);
    m.mean_y1sq = m.var_y1 + m.mean_y1 * m.mean_y1;
    m.mean_y2 = m.var_y1;
    return m;
}

HardeningRatio hardening_ratio(double lambda_per_m2, unsigned n_per_ap, double alpha, double rho_m)
{
    check_inputs(lambda_per_m2, alpha, rho_m);
    if (n_per_ap == 0)
        throw std::invalid_argument("Number of antennas per AP must be positive.");

    const double n = n_per_ap;
    const double lp = lambda_per_m2 * std::numbers::pi;
    const double a = first_order_integral(alpha, rho_m);
    const double b = second_order_integral(alpha, rho_m);

    HardeningRatio h;
    // E[Y2] / (N E[Y1^2]) = (1/N) / (1 + E[Y1]^2 / Var[Y1]); finite at lambda = 0
    h.exact = (1.0 / n) / (1.0 + lp * a * a / b);

    if (is_free_space(alpha))
    {
        h.regime = PathlossRegime::FreeSpace;
        const double s = 1.0 + 2.0 * std::log(rho_m);
        h.asymptotic = (1.0 / n) / (1.0 + lp * s * s * (alpha - 1.0) / alpha);
    }
    else if (alpha > 2.0)
    {
        h.regime = PathlossRegime::SteepDecay;
        h.asymptotic = (1.0 / n) / (1.0 + lp * alpha * (alpha - 1.0) / ((alpha - 2.0) * (alpha - 2.0)));
    }
    else
    {
        h.regime = PathlossRegime::NearField;
        const double g = 4.0 * std::pow(rho_m, 4.0 - 2.0 * alpha) / ((2.0 - alpha) * (2.0 - alpha));
        h.asymptotic = (1.0 / n) / (1.0 + lp * g * (alpha - 1.0) / alpha);
    }
    return h;
}

double hardening_ratio_fixed_density(double mu_per_m2, unsigned n_per_ap, double alpha)
{
    if (!(alpha > 2.0))
        throw std::invalid_argument("Fixed-density form needs alpha > 2.");
    if (n_per_ap == 0 || !(mu_per_m2 >= 0.0))
        throw std::invalid_argument("Invalid antenna density or antennas per AP.");
    const double c = alpha * (alpha - 1.0) / ((alpha - 2.0) * (alpha - 2.0));
    return 1.0 / (static_cast<double>(n_per_ap) + mu_per_m2 * std::numbers::pi * c);
}

MomentReport moment_report(double lambda_per_m2, unsigned n_per_ap, double alpha, double rho_m)
{
    const auto g = lemma1_moments(lambda_per_m2, n_per_ap, alpha, rho_m);
    const auto s = lemma2_moments(lambda_per_m2, alpha, rho_m);
    const auto h = hardening_ratio(lambda_per_m2, n_per_ap, alpha, rho_m);
    return {g.mean, g.variance, s.mean_y1, s.var_y1, s.mean_y1sq, s.mean_y2, h.exact};
}

ThreeSlopeMoments three_slope_moments(double lambda_per_m2, unsigned n_per_ap, double d0_m, double d1_m)
{
    if (!(d0_m > 0.0) || !(d1_m > d0_m))
        throw std::invalid_argument("Three-slope moments require 0 < d0 < d1.");
    if (!(lambda_per_m2 >= 0.0) || n_per_ap == 0)
        throw std::invalid_argument("Invalid AP intensity or antennas per AP.");

    const double n = n_per_ap;
    const double lp2 = 2.0 * lambda_per_m2 * std::numbers::pi;
    const double log_term = std::log(d1_m) - std::log(d0_m) + 7.0 / 6.0;
    const double inv_d0sq = 1.0 / (d0_m * d0_m);
    const double inv_d1sq = 1.0 / (d1_m * d1_m);

    ThreeSlopeMoments m;
    m.mean_y1 = lp2 * std::pow(d1_m, -1.5) * log_term;
    m.var_y1 = lp2 * std::pow(d1_m, -3.0) * (inv_d0sq - 0.3 * inv_d1sq);
    m.mean_y1sq = m.var_y1 + m.mean_y1 * m.mean_y1;
    m.ratio_exact = (1.0 / n) / (1.0 + lp2 * log_term * log_term / (inv_d0sq - 0.3 * inv_d1sq));
    m.ratio_approx = (1.0 / n) / (1.0 + lp2 * d0_m * d0_m * log_term * log_term);
    return m;
}

} // namespace cfmimo
