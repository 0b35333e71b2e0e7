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

#ifndef CFMIMO_PROPAGATION_HPP
#define CFMIMO_PROPAGATION_HPP

#include "cfmimo/geometry.hpp"
#include "cfmimo/random.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cfmimo
{

/// l(r) = min(1, r^-exponent), exponent > 1.
struct SingleSlope
{
    double exponent = 3.76;
};

/// Piecewise law with slopes 0 / 2 / 3.5 over [0, d0), [d0, d1], (d1, inf),
/// scaled by the linear constant 10^(c_db / 10).
struct ThreeSlope
{
    double d0_m = 10.0;
    double d1_m = 50.0;
    double c_db = 0.0;
};

/// Log-normal shadowing 10^(sigma_db * z / 10), applied only beyond `cutoff_m`.
struct Shadowing
{
    double sigma_db = 0.0;
    double cutoff_m = 50.0;
};

class PropagationModel
{
  public:
    using Law = std::variant<SingleSlope, ThreeSlope>;

    static PropagationModel single_slope(double exponent);
    static PropagationModel three_slope(double d0_m, double d1_m, double c_db = 0.0);

    /// Copy of this model with shadowing enabled.
    PropagationModel with_shadowing(double sigma_db, double cutoff_m = 50.0) const;

    const Law &law() const noexcept { return law_; }
    const std::optional<Shadowing> &shadowing() const noexcept { return shadowing_; }
    bool is_single_slope() const noexcept { return std::holds_alternative<SingleSlope>(law_); }

    /// Linear pathloss gain at distance r (m). Bounded at r = 0 for both laws.
    double gain(double r) const;

    /// Upper bound of gain() over all r.
    double max_gain() const;

    std::string describe() const;

  private:
    explicit PropagationModel(Law law) : law_(law) {}

    Law law_;
    std::optional<Shadowing> shadowing_;
    double scale_ = 1.0;  // three-slope: linear C
    double d1_pow_ = 1.0; // three-slope: d1^-1.5
};

inline double pathloss(const PropagationModel &model, double r) { return model.gain(r); }

/// One shadowing draw at distance r. Exactly 1 within the cutoff.
/// Throws std::logic_error when the model has no shadowing configured.
double shadowing_factor(const PropagationModel &model, double r, Rng &rng);

/// Per-(AP, user) large-scale coefficients for one realization.
///
/// `beta` is stored per AP (L x K); every one of the N co-located antennas
/// of an AP shares its row. `per_antenna()` expands to the M = L*N form.
struct LargeScaleProfile
{
    Eigen::MatrixXd beta; // L x K, linear scale
    unsigned n_per_ap = 1;
    std::vector<Point2> users;

    std::size_t num_aps() const noexcept { return static_cast<std::size_t>(beta.rows()); }
    std::size_t num_users() const noexcept { return static_cast<std::size_t>(beta.cols()); }
    std::size_t num_antennas() const noexcept { return num_aps() * n_per_ap; }

    /// M x K matrix with each AP row replicated N times.
    Eigen::MatrixXd per_antenna() const;
};

LargeScaleProfile large_scale_profile(const NetworkRealization &real, const std::vector<Point2> &users,
                                      const PropagationModel &model, Rng &rng);

/// Link-budget constant C in dB (Hata-style, including the +94 dB noise
/// normalization and the +105 dB km-to-m correction). f in MHz, heights in m.
double constant_c_db(double f_mhz, double h_ap_m, double h_u_m);

} // namespace cfmimo

#endif
