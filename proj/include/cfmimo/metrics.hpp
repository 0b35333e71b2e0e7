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

#ifndef CFMIMO_METRICS_HPP
#define CFMIMO_METRICS_HPP

#include "cfmimo/channel.hpp"
#include "cfmimo/propagation.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cfmimo
{

enum class MetricKind
{
    Xch,
    Xfp,
    XchShadow,
    XfpShadow,
    ChannelGain,
    Rate
};

struct MetricSample
{
    double value = 0.0;
    MetricKind kind = MetricKind::Xch;
};

// Channel hardening metric sum(beta^2) / (N (sum beta)^2). Lies in (0, 1/N].
// With a shadowed profile this is the shadowed variant. Rejects L = 0.
double x_ch(std::span<const double> beta, unsigned n_per_ap);
double x_ch(const LargeScaleProfile &profile, std::size_t user);

// Channel orthogonality metric sum(b_k b_j) / (N sum(b_k) sum(b_j)). Lies in [0, 1/N].
double x_fp(std::span<const double> beta_k, std::span<const double> beta_j, unsigned n_per_ap);
double x_fp(const LargeScaleProfile &profile, std::size_t user_k, std::size_t user_j);

/// g_k^H g_j / sqrt(E[||g_k||^2 | d] E[||g_j||^2 | d]) for one fading draw.
std::complex<double> normalized_inner_product(const ChannelDraw &draw, const LargeScaleProfile &profile,
                                              std::size_t user_k, std::size_t user_j);

struct VarianceBound
{
    double variance_expr = 0.0; // conditional variance of the normalized inner product (= X_fp)
    double bound = 0.0;         // L / (N L^2 avg_k avg_j)
    bool holds = false;
};

VarianceBound var_bound_check(const LargeScaleProfile &profile, std::size_t user_k, std::size_t user_j);

/// Empirical CDF over R scalar samples.
class EmpiricalCdf
{
  public:
    explicit EmpiricalCdf(std::vector<double> samples);

    /// Fraction of samples <= x.
    double query(double x) const;
    /// Smallest sample v with query(v) >= p, p in (0, 1].
    double quantile(double p) const;
    /// Binomial standard error of query(x).
    double standard_error(double x) const;

    std::size_t size() const noexcept { return sorted_.size(); }
    const std::vector<double> &sorted() const noexcept { return sorted_; }

  private:
    std::vector<double> sorted_;
};

EmpiricalCdf cdf_estimate(const std::vector<MetricSample> &samples);

/// sup_x |F_a(x) - F_b(x)| for two empirical CDFs.
double ks_distance(const EmpiricalCdf &a, const EmpiricalCdf &b);

/// sup_x |F(x) - cdf(x)| against a continuous reference CDF.
double ks_distance(const EmpiricalCdf &a, const std::function<double(double)> &cdf);

/// n points log-uniformly spaced over [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

} // namespace cfmimo

#endif
