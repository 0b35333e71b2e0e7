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

#include "cfmimo/propagation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cfmimo
{

PropagationModel PropagationModel::single_slope(double exponent)
{
    if (!(exponent > 1.0))
        throw std::invalid_argument("Single-slope pathloss exponent must be > 1.");
    return PropagationModel(SingleSlope{exponent});
}

PropagationModel PropagationModel::three_slope(double d0_m, double d1_m, double c_db)
{
    if (!(d0_m > 0.0) || !(d1_m > d0_m))
        throw std::invalid_argument("Three-slope model requires 0 < d0 < d1.");
    if (!std::isfinite(c_db))
        throw std::invalid_argument("Three-slope constant must be finite.");
    PropagationModel m(ThreeSlope{d0_m, d1_m, c_db});
    m.scale_ = std::pow(10.0, c_db / 10.0);
    m.d1_pow_ = std::pow(d1_m, -1.5);
    return m;
}

PropagationModel PropagationModel::with_shadowing(double sigma_db, double cutoff_m) const
{
    if (!(sigma_db >= 0.0))
        throw std::invalid_argument("Shadowing standard deviation must be non-negative.");
    if (!(cutoff_m > 0.0))
        throw std::invalid_argument("Shadowing cutoff must be positive.");
    PropagationModel m = *this;
    m.shadowing_ = Shadowing{sigma_db, cutoff_m};
    return m;
}

double PropagationModel::gain(double r) const
{
    if (!(r >= 0.0))
        throw std::invalid_argument("Distance must be non-negative.");

    if (const auto *s = std::get_if<SingleSlope>(&law_))
        return r <= 1.0 ? 1.0 : std::exp(-s->exponent * std::log(r));

    const auto &t = std::get<ThreeSlope>(law_);
    const double c = scale_;
    const double d1_15 = d1_pow_;
    if (r > t.d1_m)
        return c * std::pow(r, -3.5);
    if (r >= t.d0_m)
        return c * d1_15 / (r * r);
    return c * d1_15 / (t.d0_m * t.d0_m);
}

double PropagationModel::max_gain() const
{
    return gain(0.0);
}

std::string PropagationModel::describe() const
{
    std::ostringstream os;
    if (const auto *s = std::get_if<SingleSlope>(&law_))
        os << "single-slope(alpha=" << s->exponent << ")";
    else
    {
        const auto &t = std::get<ThreeSlope>(law_);
        os << "three-slope(d0=" << t.d0_m << ",d1=" << t.d1_m << ",C_dB=" << t.c_db << ")";
    }
    if (shadowing_)
        os << "+shadowing(sigma_dB=" << shadowing_->sigma_db << ",cutoff=" << shadowing_->cutoff_m << ")";
    return os.str();
}

double shadowing_factor(const PropagationModel &model, double r, Rng &rng)
{
    const auto &sh = model.shadowing();
    if (!sh)
        throw std::logic_error("shadowing_factor called on a model without shadowing.");
    if (r <= sh->cutoff_m)
        return 1.0;
    // Draw z even for sigma = 0 so enabling shadowing never shifts the stream
    // consumption pattern between sigma values.
    const double z = rng.normal();
    return std::pow(10.0, sh->sigma_db * z / 10.0);
}

Eigen::MatrixXd LargeScaleProfile::per_antenna() const
{
    const Eigen::Index n = n_per_ap;
    Eigen::MatrixXd out(beta.rows() * n, beta.cols());
    for (Eigen::Index i = 0; i < beta.rows(); ++i)
        out.middleRows(i * n, n).rowwise() = beta.row(i);
    return out;
}

LargeScaleProfile large_scale_profile(const NetworkRealization &real, const std::vector<Point2> &users,
                                      const PropagationModel &model, Rng &rng)
{
    const auto L = static_cast<Eigen::Index>(real.num_aps());
    const auto K = static_cast<Eigen::Index>(users.size());

    LargeScaleProfile prof{Eigen::MatrixXd(L, K), real.n_per_ap, users};
    const bool shadowed = model.shadowing().has_value();
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index i = 0; i < L; ++i)
        {
            const double r = distance(real.ap_positions[static_cast<std::size_t>(i)], users[static_cast<std::size_t>(k)]);
            double b = model.gain(r);
            if (shadowed)
                b *= shadowing_factor(model, r, rng);
            prof.beta(i, k) = b;
        }
    return prof;
}

double constant_c_db(double f_mhz, double h_ap_m, double h_u_m)
{
    if (!(f_mhz > 0.0) || !(h_ap_m > 0.0) || !(h_u_m > 0.0))
        throw std::invalid_argument("Carrier frequency and antenna heights must be positive.");
    const double lf = std::log10(f_mhz);
    return 105.0 + 94.0 - 46.3 - 33.9 * lf + 13.82 * std::log10(h_ap_m) + (1.1 * lf - 0.7) * h_u_m -
           (1.56 * lf - 0.8);
}

} // namespace cfmimo
