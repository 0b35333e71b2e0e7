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

#include "cfmimo/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmimo
{

namespace
{

void check_user(const Eigen::MatrixXd &m, std::size_t user)
{
    if (user >= static_cast<std::size_t>(m.cols()))
        throw std::out_of_range("User index out of range.");
}

// Running sum / sum of squares of a per-draw quantity.
struct Accumulator
{
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v)
    {
        sum += v;
        sum_sq += v * v;
    }

    RateEstimate finish(std::size_t n, double max_rel) const
    {
        RateEstimate e;
        const double dn = static_cast<double>(n);
        e.value = sum / dn;
        const double var = n > 1 ? std::max(0.0, (sum_sq - dn * e.value * e.value) / (dn - 1.0)) : 0.0;
        e.std_error = std::sqrt(var / dn);
        e.converged = e.std_error <= max_rel * std::abs(e.value) || e.std_error == 0.0;
        return e;
    }
};

} // namespace

void RateScenario::validate() const
{
    if (num_users == 0)
        throw std::invalid_argument("Rate scenario needs at least one user.");
    if (tau_p != num_users)
        throw std::invalid_argument("Orthogonal pilots require tau_p = K.");
    if (tau_c <= tau_p)
        throw std::invalid_argument("Coherence block must leave at least one data sample.");
    if (!(pilot_power_mw > 0.0) || !(data_power_mw > 0.0) || !(dl_power_mw > 0.0))
        throw std::invalid_argument("Transmit powers must be positive.");
    if (fading_draws < 2)
        throw std::invalid_argument("At least two fading draws are needed.");
    if (!(max_relative_stderr > 0.0))
        throw std::invalid_argument("Relative standard-error tolerance must be positive.");
}

Eigen::MatrixXd estimation_gamma(const Eigen::MatrixXd &beta, const RateScenario &scenario)
{
    const double tr = static_cast<double>(scenario.tau_p) * scenario.pilot_power_mw;
    return (tr * beta.array().square() / (tr * beta.array() + 1.0)).matrix();
}

Eigen::MatrixXcd mmse_estimate(const Eigen::MatrixXd &beta, const RateScenario &scenario, const Eigen::MatrixXcd &g,
                               const Eigen::MatrixXcd &w)
{
    if (g.rows() != beta.rows() || g.cols() != beta.cols() || w.rows() != beta.rows() || w.cols() != beta.cols())
        throw std::invalid_argument("Channel, noise and beta dimensions differ.");
    const double tr = static_cast<double>(scenario.tau_p) * scenario.pilot_power_mw;
    const double s = std::sqrt(tr);
    const Eigen::ArrayXXd gain = s * beta.array() / (tr * beta.array() + 1.0);
    return (gain.cast<std::complex<double>>() * (s * g.array() + w.array())).matrix();
}

double ul_rate_uatf(const Eigen::MatrixXd &beta, const Eigen::MatrixXd &gamma, const RateScenario &scenario,
                    std::size_t user)
{
    check_user(gamma, user);
    const auto k = static_cast<Eigen::Index>(user);
    const double p = scenario.data_power_mw;
    const double sum_gamma = gamma.col(k).sum();
    // sum_j p_j sum_m gamma_{m,k} beta_{m,j}
    const double interference = p * (gamma.col(k).transpose() * beta).sum();
    return std::log2(1.0 + p * sum_gamma * sum_gamma / (interference + sum_gamma));
}

Eigen::VectorXd dl_power_alloc(const Eigen::MatrixXd &gamma, double q, std::size_t user)
{
    check_user(gamma, user);
    if (!(q >= 0.0))
        throw std::invalid_argument("Downlink power must be non-negative.");
    const auto col = gamma.col(static_cast<Eigen::Index>(user));
    const double total = col.sum();
    if (!(total > 0.0))
        throw std::invalid_argument("Estimation quality is zero for every antenna.");
    return q * col / total;
}

Eigen::MatrixXd dl_power_alloc(const Eigen::MatrixXd &gamma, double q)
{
    Eigen::MatrixXd p(gamma.rows(), gamma.cols());
    for (Eigen::Index k = 0; k < gamma.cols(); ++k)
        p.col(k) = dl_power_alloc(gamma, q, static_cast<std::size_t>(k));
    return p;
}

double dl_rate_uatf(const Eigen::MatrixXd &beta, const Eigen::MatrixXd &gamma, const Eigen::MatrixXd &powers,
                    std::size_t user)
{
    check_user(gamma, user);
    const auto k = static_cast<Eigen::Index>(user);
    const double signal = (powers.col(k).array() * gamma.col(k).array()).sqrt().sum();
    // sum_k' sum_m p_{m,k'} beta_{m,k}
    const double interference = powers.rowwise().sum().dot(beta.col(k));
    return std::log2(1.0 + signal * signal / (interference + 1.0));
}

RateSimulator::RateSimulator(const LargeScaleProfile &profile, RateScenario scenario) : scenario_(scenario)
{
    scenario_.validate();
    if (profile.num_users() != scenario_.num_users)
        throw std::invalid_argument("Profile user count differs from the scenario.");
    if (profile.num_aps() == 0)
        throw std::invalid_argument("Rate evaluation needs at least one AP.");

    beta_ = profile.per_antenna();
    sqrt_beta_ = beta_.cwiseSqrt();
    gamma_ = estimation_gamma(beta_, scenario_);

    const double tr = static_cast<double>(scenario_.tau_p) * scenario_.pilot_power_mw;
    estimator_gain_ = (std::sqrt(tr) * beta_.array() / (tr * beta_.array() + 1.0)).matrix();

    powers_ = dl_power_alloc(gamma_, scenario_.dl_power_mw);

    // sqrt(p_{m,k} / gamma_{m,k}) = sqrt(q / sum_m gamma_{m,k}), the same for every antenna
    precoder_scale_.resize(beta_.rows(), beta_.cols());
    for (Eigen::Index k = 0; k < beta_.cols(); ++k)
        precoder_scale_.col(k).setConstant(std::sqrt(scenario_.dl_power_mw / gamma_.col(k).sum()));

    ul_noise_diag_ = scenario_.data_power_mw * (beta_ - gamma_).rowwise().sum();
    ul_noise_diag_.array() += 1.0;
}

RateSimulator::Draw RateSimulator::draw(Rng &rng) const
{
    const auto M = static_cast<std::size_t>(beta_.rows());
    const auto K = static_cast<std::size_t>(beta_.cols());
    const double s = std::sqrt(static_cast<double>(scenario_.tau_p) * scenario_.pilot_power_mw);

    Draw d;
    const Eigen::MatrixXcd h = draw_fading(M, K, rng);
    const Eigen::MatrixXcd w = draw_fading(M, K, rng);
    d.g = sqrt_beta_.cast<std::complex<double>>().cwiseProduct(h);
    d.g_hat = estimator_gain_.cast<std::complex<double>>().cwiseProduct(s * d.g + w);
    return d;
}

RateResults RateSimulator::run(Rng &rng) const
{
    const Eigen::Index K = beta_.cols();
    const std::size_t draws = scenario_.fading_draws;
    const double p = scenario_.data_power_mw;
    const double max_rel = scenario_.max_relative_stderr;

    std::vector<Accumulator> ul_gen(K), ul_perf(K), dl_perf(K);
    Eigen::MatrixXcd dl_sum = Eigen::MatrixXcd::Zero(K, K);
    Eigen::MatrixXd dl_sum_sq = Eigen::MatrixXd::Zero(K, K);

    const Eigen::MatrixXcd scale = precoder_scale_.cast<std::complex<double>>();

    for (std::size_t n = 0; n < draws; ++n)
    {
        const Draw d = draw(rng);

        // Uplink, MR combining a_k = g_hat_k: A(k, j) = a_k^H g_hat_j
        const Eigen::MatrixXd A = (d.g_hat.adjoint() * d.g_hat).cwiseAbs2();
        const Eigen::VectorXd ul_noise = d.g_hat.cwiseAbs2().transpose() * ul_noise_diag_;
        // Perfect CSI: B(k, j) = g_k^H g_j
        const Eigen::MatrixXd B = (d.g.adjoint() * d.g).cwiseAbs2();
        const Eigen::VectorXd gain = d.g.colwise().squaredNorm().transpose();

        // Downlink, MR precoding: X(j, k) = a_j^H g_k
        const Eigen::MatrixXcd a = scale.cwiseProduct(d.g_hat);
        const Eigen::MatrixXcd X = a.adjoint() * d.g;
        const Eigen::MatrixXd X2 = X.cwiseAbs2();
        dl_sum += X;
        dl_sum_sq += X2;

        const Eigen::VectorXd ul_row_sum = A.rowwise().sum();
        const Eigen::VectorXd perf_row_sum = B.rowwise().sum();
        const Eigen::VectorXd dl_col_sum = X2.colwise().sum().transpose();
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const double sig = A(k, k);
            ul_gen[k].add(std::log2(1.0 + p * sig / (p * (ul_row_sum(k) - sig) + ul_noise(k))));

            const double psig = B(k, k);
            ul_perf[k].add(std::log2(1.0 + p * psig / (p * (perf_row_sum(k) - psig) + gain(k))));

            const double dsig = X2(k, k);
            dl_perf[k].add(std::log2(1.0 + dsig / (dl_col_sum(k) - dsig + 1.0)));
        }
    }

    RateResults out;
    const double dn = static_cast<double>(draws);
    const double tau_d = static_cast<double>(scenario_.tau_d());
    const Eigen::MatrixXcd mean = dl_sum / dn;
    // Unbiased variance of a_j^H g_k over the draws
    const Eigen::MatrixXd var = ((dl_sum_sq / dn - mean.cwiseAbs2()) * (dn / (dn - 1.0))).cwiseMax(0.0);

    for (Eigen::Index k = 0; k < K; ++k)
    {
        const auto user = static_cast<std::size_t>(k);
        out.ul_uatf.push_back(ul_rate_uatf(beta_, gamma_, scenario_, user));
        out.ul_general.push_back(ul_gen[k].finish(draws, max_rel));
        out.ul_perfect.push_back(ul_perf[k].finish(draws, max_rel));
        out.dl_uatf.push_back(dl_rate_uatf(beta_, gamma_, powers_, user));

        const RateEstimate perfect = dl_perf[k].finish(draws, max_rel);
        out.dl_perfect.push_back(perfect);

        DownlinkGeneral g;
        g.first_term = perfect.value;
        for (Eigen::Index j = 0; j < K; ++j)
            g.penalty += std::log2(1.0 + tau_d * var(j, k));
        g.penalty /= tau_d;
        g.clamped = g.first_term < g.penalty;
        g.rate.value = g.clamped ? 0.0 : g.first_term - g.penalty;
        g.rate.std_error = perfect.std_error;
        g.rate.converged = g.rate.std_error <= max_rel * std::abs(g.rate.value) || g.rate.std_error == 0.0;
        out.dl_general.push_back(g);
    }
    return out;
}

RateEstimate ul_rate_general(const LargeScaleProfile &profile, const RateScenario &scenario, std::size_t user,
                             Rng &rng)
{
    const RateSimulator sim(profile, scenario);
    const auto res = sim.run(rng);
    if (user >= res.ul_general.size())
        throw std::out_of_range("User index out of range.");
    return res.ul_general[user];
}

DownlinkGeneral dl_rate_general(const LargeScaleProfile &profile, const RateScenario &scenario, std::size_t user,
                                Rng &rng)
{
    const RateSimulator sim(profile, scenario);
    const auto res = sim.run(rng);
    if (user >= res.dl_general.size())
        throw std::out_of_range("User index out of range.");
    return res.dl_general[user];
}

} // namespace cfmimo
