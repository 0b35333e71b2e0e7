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

#ifndef CFMIMO_RATES_HPP
#define CFMIMO_RATES_HPP

#include "cfmimo/channel.hpp"
#include "cfmimo/propagation.hpp"
#include "cfmimo/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace cfmimo
{

// Uplink / downlink achievable rates with MMSE estimation from orthogonal
// pilots and MR processing. Noise variance is 1; powers are in mW and the
// link-budget constant of the pathloss absorbs the noise normalization.
//
// Matrices named `beta` and `gamma` below are per antenna (M x K).

struct RateScenario
{
    std::size_t num_users = 20;  // K
    std::size_t tau_c = 500;     // coherence block length
    std::size_t tau_p = 20;      // pilot length, equal to K
    double pilot_power_mw = 100.0;
    double data_power_mw = 100.0;
    double dl_power_mw = 100.0;  // q, per user
    std::size_t fading_draws = 1000;
    double max_relative_stderr = 0.05; // convergence flag threshold

    std::size_t tau_d() const noexcept { return tau_c - tau_p; }

    /// Throws std::invalid_argument unless tau_p = K, tau_d >= 1 and powers > 0.
    void validate() const;
};

/// gamma_{m,k} = tau_p rho beta^2 / (tau_p rho beta + 1).
Eigen::MatrixXd estimation_gamma(const Eigen::MatrixXd &beta, const RateScenario &scenario);

/// MMSE estimate of g from the despread pilot observation sqrt(tau_p rho) g + w.
Eigen::MatrixXcd mmse_estimate(const Eigen::MatrixXd &beta, const RateScenario &scenario, const Eigen::MatrixXcd &g,
                               const Eigen::MatrixXcd &w);

/// Closed-form uplink use-and-then-forget rate (bit/s/Hz).
double ul_rate_uatf(const Eigen::MatrixXd &beta, const Eigen::MatrixXd &gamma, const RateScenario &scenario,
                    std::size_t user);

/// p_{m,k} = q gamma_{m,k} / sum_m' gamma_{m',k}. Sums to q exactly.
Eigen::VectorXd dl_power_alloc(const Eigen::MatrixXd &gamma, double q, std::size_t user);

/// Per-antenna power matrix (M x K) for all users.
Eigen::MatrixXd dl_power_alloc(const Eigen::MatrixXd &gamma, double q);

/// Closed-form downlink use-and-then-forget rate (bit/s/Hz).
double dl_rate_uatf(const Eigen::MatrixXd &beta, const Eigen::MatrixXd &gamma, const Eigen::MatrixXd &powers,
                    std::size_t user);

/// Monte-Carlo expectation with its standard error.
struct RateEstimate
{
    double value = 0.0;
    double std_error = 0.0;
    bool converged = true; // stderr within the scenario's relative tolerance
};

struct DownlinkGeneral
{
    RateEstimate rate;           // first term minus penalty, clamped at 0
    double first_term = 0.0;     // perfect-CSI expectation
    double penalty = 0.0;        // (1/tau_d) sum_j log2(1 + tau_d Var[a_j^H g_k])
    bool clamped = false;        // first_term < penalty
};

/// Per-user results for one large-scale realization. All Monte-Carlo terms
/// share the same fading and noise draws.
struct RateResults
{
    std::vector<double> ul_uatf;
    std::vector<RateEstimate> ul_general;
    std::vector<RateEstimate> ul_perfect;
    std::vector<double> dl_uatf;
    std::vector<DownlinkGeneral> dl_general;
    std::vector<RateEstimate> dl_perfect;
};

/// Evaluates every rate expression for one realization.
class RateSimulator
{
  public:
    RateSimulator(const LargeScaleProfile &profile, RateScenario scenario);

    const Eigen::MatrixXd &beta() const noexcept { return beta_; }
    const Eigen::MatrixXd &gamma() const noexcept { return gamma_; }
    const Eigen::MatrixXd &dl_powers() const noexcept { return powers_; }

    RateResults run(Rng &rng) const;

    /// One draw of the channel and its MMSE estimate (for tests).
    struct Draw
    {
        Eigen::MatrixXcd g;
        Eigen::MatrixXcd g_hat;
    };
    Draw draw(Rng &rng) const;

  private:
    RateScenario scenario_;
    Eigen::MatrixXd beta_;
    Eigen::MatrixXd sqrt_beta_;
    Eigen::MatrixXd gamma_;
    Eigen::MatrixXd estimator_gain_; // sqrt(tau_p rho) beta / (tau_p rho beta + 1)
    Eigen::MatrixXd powers_;
    Eigen::MatrixXd precoder_scale_; // sqrt(p_{m,k} / gamma_{m,k})
    Eigen::VectorXd ul_noise_diag_;  // sum_j p_j (beta_{m,j} - gamma_{m,j}) + 1
};

/// Monte-Carlo uplink rate with MR combining of the MMSE estimates.
RateEstimate ul_rate_general(const LargeScaleProfile &profile, const RateScenario &scenario, std::size_t user,
                             Rng &rng);

/// Downlink rate where the user estimates its precoded channel from the data
/// block; Var[a_j^H g_k] is estimated over the fading draws.
DownlinkGeneral dl_rate_general(const LargeScaleProfile &profile, const RateScenario &scenario, std::size_t user,
                                Rng &rng);

} // namespace cfmimo

#endif
