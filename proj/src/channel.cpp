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

#include "cfmimo/channel.hpp"

#include <algorithm>
#include <cmath>

namespace cfmimo
{

Eigen::MatrixXcd draw_fading(std::size_t num_antennas, std::size_t num_users, Rng &rng)
{
    Eigen::MatrixXcd h(static_cast<Eigen::Index>(num_antennas), static_cast<Eigen::Index>(num_users));
    // Column-major fill: user k's antennas are consecutive in the stream
    for (Eigen::Index k = 0; k < h.cols(); ++k)
        for (Eigen::Index m = 0; m < h.rows(); ++m)
            h(m, k) = rng.complex_normal();
    return h;
}

ChannelDraw make_channel(const LargeScaleProfile &profile, Eigen::MatrixXcd h)
{
    if (static_cast<std::size_t>(h.rows()) != profile.num_antennas() ||
        static_cast<std::size_t>(h.cols()) != profile.num_users())
        throw std::invalid_argument("Fading matrix does not match the profile dimensions.");

    ChannelDraw d;
    d.g = profile.per_antenna().cwiseSqrt().cast<std::complex<double>>().cwiseProduct(h);
    d.h = std::move(h);
    return d;
}

Eigen::VectorXd draw_gamma_sums(std::size_t num_aps, unsigned n_per_ap, Rng &rng)
{
    Eigen::VectorXd H(static_cast<Eigen::Index>(num_aps));
    for (auto &v : H)
        v = rng.gamma_int(n_per_ap);
    return H;
}

Eigen::VectorXd gamma_sums_from_fading(const Eigen::MatrixXcd &h, unsigned n_per_ap, std::size_t user)
{
    if (n_per_ap == 0 || h.rows() % n_per_ap != 0)
        throw std::invalid_argument("Antenna count is not a multiple of the antennas per AP.");
    const Eigen::Index n = n_per_ap;
    const Eigen::Index L = h.rows() / n;
    Eigen::VectorXd H(L);
    const auto k = static_cast<Eigen::Index>(user);
    for (Eigen::Index i = 0; i < L; ++i)
        H(i) = h.col(k).segment(i * n, n).squaredNorm();
    return H;
}

double channel_gain(const LargeScaleProfile &profile, const Eigen::VectorXd &gamma_sums, std::size_t user)
{
    if (static_cast<std::size_t>(gamma_sums.size()) != profile.num_aps())
        throw std::invalid_argument("Gamma sums do not match the number of APs.");
    if (profile.num_aps() == 0)
        return 0.0;
    return gamma_sums.dot(profile.beta.col(static_cast<Eigen::Index>(user)));
}

double channel_gain(const ChannelDraw &draw, std::size_t user)
{
    return draw.g.col(static_cast<Eigen::Index>(user)).squaredNorm();
}

ConditionalMoments conditional_moments(const LargeScaleProfile &profile, std::size_t user)
{
    if (profile.num_aps() == 0)
        throw std::invalid_argument("Conditional moments need at least one AP.");
    const auto col = profile.beta.col(static_cast<Eigen::Index>(user));
    const double n = profile.n_per_ap;
    return {n * col.sum(), n * col.squaredNorm()};
}

double hypoexp_cdf(std::span<const double> rates, double x)
{
    if (rates.empty())
        throw std::invalid_argument("Hypoexponential CDF needs at least one rate.");
    for (double mu : rates)
        if (!(mu > 0.0) || !std::isfinite(mu))
            throw std::invalid_argument("Hypoexponential rates must be positive and finite.");
    for (std::size_t i = 0; i < rates.size(); ++i)
        for (std::size_t j = i + 1; j < rates.size(); ++j)
            if (std::abs(rates[i] - rates[j]) < 1e-9 * std::max(rates[i], rates[j]))
                throw NearDuplicateRates("Hypoexponential rates are not distinct.");

    if (x <= 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;

    // F(x) = 1 - sum_i w_i exp(-mu_i x), w_i = prod_{j != i} mu_j / (mu_j - mu_i)
    double tail = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i)
    {
        double w = 1.0;
        for (std::size_t j = 0; j < rates.size(); ++j)
            if (j != i)
                w *= rates[j] / (rates[j] - rates[i]);
        tail += w * std::exp(-rates[i] * x);
    }
    return std::clamp(1.0 - tail, 0.0, 1.0);
}

} // namespace cfmimo
