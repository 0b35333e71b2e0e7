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

#include "cfmimo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfmimo
{

namespace
{

std::span<const double> column(const LargeScaleProfile &profile, std::size_t user)
{
    if (user >= profile.num_users())
        throw std::out_of_range("User index out of range.");
    return {profile.beta.col(static_cast<Eigen::Index>(user)).data(), profile.num_aps()};
}

} // namespace

double x_ch(std::span<const double> beta, unsigned n_per_ap)
{
    if (beta.empty())
        throw std::invalid_argument("X_ch needs at least one AP.");
    if (n_per_ap == 0)
        throw std::invalid_argument("Number of antennas per AP must be positive.");
    double s1 = 0.0, s2 = 0.0;
    for (double b : beta)
    {
        s1 += b;
        s2 += b * b;
    }
    return s2 / (n_per_ap * s1 * s1);
}

double x_ch(const LargeScaleProfile &profile, std::size_t user)
{
    return x_ch(column(profile, user), profile.n_per_ap);
}

double x_fp(std::span<const double> beta_k, std::span<const double> beta_j, unsigned n_per_ap)
{
    if (beta_k.empty())
        throw std::invalid_argument("X_fp needs at least one AP.");
    if (beta_k.size() != beta_j.size())
        throw std::invalid_argument("X_fp coefficient vectors differ in length.");
    if (n_per_ap == 0)
        throw std::invalid_argument("Number of antennas per AP must be positive.");
    double sk = 0.0, sj = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < beta_k.size(); ++i)
    {
        sk += beta_k[i];
        sj += beta_j[i];
        cross += beta_k[i] * beta_j[i];
    }
    return cross / (n_per_ap * sk * sj);
}

double x_fp(const LargeScaleProfile &profile, std::size_t user_k, std::size_t user_j)
{
    if (user_k == user_j)
        throw std::invalid_argument("X_fp needs two distinct users.");
    return x_fp(column(profile, user_k), column(profile, user_j), profile.n_per_ap);
}

std::complex<double> normalized_inner_product(const ChannelDraw &draw, const LargeScaleProfile &profile,
                                              std::size_t user_k, std::size_t user_j)
{
    const auto mk = conditional_moments(profile, user_k).mean;
    const auto mj = conditional_moments(profile, user_j).mean;
    const auto gk = draw.g.col(static_cast<Eigen::Index>(user_k));
    const auto gj = draw.g.col(static_cast<Eigen::Index>(user_j));
    return gk.dot(gj) / std::sqrt(mk * mj); // Eigen's dot conjugates the first operand
}

VarianceBound var_bound_check(const LargeScaleProfile &profile, std::size_t user_k, std::size_t user_j)
{
    const auto bk = column(profile, user_k);
    const auto bj = column(profile, user_j);
    if (bk.empty())
        throw std::invalid_argument("Variance bound needs at least one AP.");

    const double L = static_cast<double>(bk.size());
    const double n = profile.n_per_ap;
    double sk = 0.0, sj = 0.0;
    for (std::size_t i = 0; i < bk.size(); ++i)
    {
        sk += bk[i];
        sj += bj[i];
    }
    VarianceBound v;
    v.variance_expr = x_fp(bk, bj, profile.n_per_ap);
    v.bound = L / (n * L * L * (sk / L) * (sj / L));
    // Allow for rounding in the equality case
    v.holds = v.variance_expr <= v.bound * (1.0 + 1e-12);
    return v;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples))
{
    if (sorted_.empty())
        throw std::invalid_argument("Empirical CDF needs at least one sample.");
    for (double v : sorted_)
        if (std::isnan(v))
            throw std::invalid_argument("Empirical CDF samples must not be NaN.");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::query(double x) const
{
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double p) const
{
    if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument("Quantile level must lie in (0, 1].");
    const double n = static_cast<double>(sorted_.size());
    // Smallest index i (1-based) with i / n >= p
    auto idx = static_cast<std::size_t>(std::ceil(p * n - 1e-9 * n));
    idx = std::clamp<std::size_t>(idx, 1, sorted_.size());
    return sorted_[idx - 1];
}

double EmpiricalCdf::standard_error(double x) const
{
    const double p = query(x);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(sorted_.size()));
}

EmpiricalCdf cdf_estimate(const std::vector<MetricSample> &samples)
{
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto &s : samples)
        v.push_back(s.value);
    return EmpiricalCdf(std::move(v));
}

double ks_distance(const EmpiricalCdf &a, const EmpiricalCdf &b)
{
    const auto &x = a.sorted();
    const auto &y = b.sorted();
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size())
    {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v)
            ++i;
        while (j < y.size() && y[j] == v)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_distance(const EmpiricalCdf &a, const std::function<double(double)> &cdf)
{
    const auto &x = a.sorted();
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double f = cdf(x[i]);
        d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
    }
    return d;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw std::invalid_argument("Log grid needs 0 < lo < hi and at least two points.");
    std::vector<double> g(n);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

} // namespace cfmimo
