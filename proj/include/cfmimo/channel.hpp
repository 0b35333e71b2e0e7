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

#ifndef CFMIMO_CHANNEL_HPP
#define CFMIMO_CHANNEL_HPP

#include "cfmimo/propagation.hpp"
#include "cfmimo/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>

namespace cfmimo
{

/// Small-scale fading h (M x K, i.i.d. CN(0,1)) and the channel
/// g = sqrt(beta) .* h built from it.
struct ChannelDraw
{
    Eigen::MatrixXcd h;
    Eigen::MatrixXcd g;
};

Eigen::MatrixXcd draw_fading(std::size_t num_antennas, std::size_t num_users, Rng &rng);

ChannelDraw make_channel(const LargeScaleProfile &profile, Eigen::MatrixXcd h);

/// Per-AP fading power sums H_i ~ Gamma(N, 1), i = 1..L.
Eigen::VectorXd draw_gamma_sums(std::size_t num_aps, unsigned n_per_ap, Rng &rng);

/// H_i = sum of |h_{m,k}|^2 over the N antennas of AP i.
Eigen::VectorXd gamma_sums_from_fading(const Eigen::MatrixXcd &h, unsigned n_per_ap, std::size_t user);

/// ||g_k||^2 = sum_i H_i * beta_{i,k}.
double channel_gain(const LargeScaleProfile &profile, const Eigen::VectorXd &gamma_sums, std::size_t user);

/// ||g_k||^2 directly from a per-antenna draw.
double channel_gain(const ChannelDraw &draw, std::size_t user);

struct ConditionalMoments
{
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean N*sum(beta) and variance N*sum(beta^2) of the channel gain given the
/// AP distances. Rejects an empty profile.
ConditionalMoments conditional_moments(const LargeScaleProfile &profile, std::size_t user);

/// Raised when hypoexponential rates are too close for the partial-fraction form.
class NearDuplicateRates : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Exact CDF of a sum of independent exponentials with the given (distinct,
/// positive) rates.
double hypoexp_cdf(std::span<const double> rates, double x);

} // namespace cfmimo

#endif
