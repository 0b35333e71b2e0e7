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

#ifndef CFMIMO_ANALYTICS_HPP
#define CFMIMO_ANALYTICS_HPP

// Closed-form shot-noise moments (Campbell's theorem) for a PPP of APs in a
// disk of radius rho around the typical user, with l(r) = min(1, r^-alpha).
//
// Notation:  Y1 = sum_i l(r_i),  Y2 = sum_i l(r_i)^2,  ||g||^2 = sum_i H_i l(r_i)
// with H_i ~ Gamma(N, 1).
//
// All functions require alpha > 1 and rho >= 1 and throw std::invalid_argument
// otherwise. alpha within 1e-6 of 2 uses the logarithmic (alpha = 2) branch.

namespace cfmimo
{

struct GainMoments
{
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance of the channel gain over PPP and fading.
GainMoments lemma1_moments(double lambda_per_m2, unsigned n_per_ap, double alpha, double rho_m);

struct SumMoments
{
    double mean_y1 = 0.0;
    double var_y1 = 0.0;
    double mean_y1sq = 0.0;
    double mean_y2 = 0.0; // equals var_y1
};

SumMoments lemma2_moments(double lambda_per_m2, double alpha, double rho_m);

enum class PathlossRegime
{
    SteepDecay,  // alpha > 2
    FreeSpace,   // alpha = 2
    NearField    // 1 < alpha < 2
};

struct HardeningRatio
{
    double exact = 0.0;      // E[Y2] / (N E[Y1^2]) at the given radius
    double asymptotic = 0.0; // large-radius form for the matching regime
    PathlossRegime regime = PathlossRegime::SteepDecay;
};

HardeningRatio hardening_ratio(double lambda_per_m2, unsigned n_per_ap, double alpha, double rho_m);

/// Ratio for alpha > 2 written in terms of the antenna density mu = N * lambda.
double hardening_ratio_fixed_density(double mu_per_m2, unsigned n_per_ap, double alpha);

/// Everything above in one record.
struct MomentReport
{
    double mean_g2 = 0.0;
    double var_g2 = 0.0;
    double mean_y1 = 0.0;
    double var_y1 = 0.0;
    double mean_y1sq = 0.0;
    double mean_y2 = 0.0;
    double hardening_ratio = 0.0;
};

MomentReport moment_report(double lambda_per_m2, unsigned n_per_ap, double alpha, double rho_m);

/// Infinite-region moments for the three-slope law with C = 1.
struct ThreeSlopeMoments
{
    double mean_y1 = 0.0;
    double var_y1 = 0.0;
    double mean_y1sq = 0.0;
    double ratio_exact = 0.0;
    double ratio_approx = 0.0; // drops the d1^-2 term, valid for d1 >> d0
};

ThreeSlopeMoments three_slope_moments(double lambda_per_m2, unsigned n_per_ap, double d0_m, double d1_m);

} // namespace cfmimo

#endif
