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

#include "cfmimo/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cfmimo
{

double distance(const Point2 &a, const Point2 &b)
{
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

Region Region::disk(double radius_m)
{
    if (!(radius_m > 0.0))
        throw std::invalid_argument("Disk radius must be positive.");
    return Region(Shape::Disk, radius_m);
}

Region Region::square(double side_m)
{
    if (!(side_m > 0.0))
        throw std::invalid_argument("Square side must be positive.");
    return Region(Shape::Square, side_m);
}

double Region::area() const
{
    return shape_ == Shape::Disk ? std::numbers::pi * size_ * size_ : size_ * size_;
}

bool Region::contains(const Point2 &p) const
{
    if (shape_ == Shape::Disk)
        return p.x * p.x + p.y * p.y <= size_ * size_;
    const double h = 0.5 * size_;
    return std::abs(p.x) <= h && std::abs(p.y) <= h;
}

Point2 Region::sample_point(Rng &rng) const
{
    if (shape_ == Shape::Disk)
    {
        // Rejection from the bounding square; avoids trigonometry in the hot loop
        for (;;)
        {
            const double x = rng.uniform(-size_, size_);
            const double y = rng.uniform(-size_, size_);
            if (x * x + y * y <= size_ * size_)
                return {x, y};
        }
    }
    const double h = 0.5 * size_;
    const double x = rng.uniform(-h, h);
    const double y = rng.uniform(-h, h);
    return {x, y};
}

std::string Region::describe() const
{
    std::ostringstream os;
    os << (shape_ == Shape::Disk ? "disk(radius=" : "square(side=") << size_ << ")";
    return os.str();
}

NetworkRealization sample_ppp(const Region &region, double lambda_per_m2, unsigned n_per_ap, Rng &rng)
{
    if (!(lambda_per_m2 >= 0.0))
        throw std::invalid_argument("AP intensity must be non-negative.");
    const auto count = rng.poisson(lambda_per_m2 * region.area());
    return sample_uniform_fixed(region, static_cast<std::size_t>(count), n_per_ap, rng);
}

NetworkRealization sample_uniform_fixed(const Region &region, std::size_t num_aps, unsigned n_per_ap, Rng &rng)
{
    if (n_per_ap == 0)
        throw std::invalid_argument("Number of antennas per AP must be positive.");

    NetworkRealization real{{}, n_per_ap, region};
    real.ap_positions.reserve(num_aps);
    for (std::size_t i = 0; i < num_aps; ++i)
        real.ap_positions.push_back(region.sample_point(rng));
    return real;
}

std::vector<double> sample_ppp_annulus_radii(double r_inner, double r_outer, double lambda_per_m2, Rng &rng)
{
    if (!(r_inner >= 0.0) || !(r_outer > r_inner))
        throw std::invalid_argument("Annulus requires 0 <= r_inner < r_outer.");
    if (!(lambda_per_m2 >= 0.0))
        throw std::invalid_argument("AP intensity must be non-negative.");

    const double a2 = r_inner * r_inner, b2 = r_outer * r_outer;
    const auto count = rng.poisson(lambda_per_m2 * std::numbers::pi * (b2 - a2));

    std::vector<double> radii(static_cast<std::size_t>(count));
    for (auto &r : radii)
        r = std::sqrt(a2 + (b2 - a2) * rng.uniform());
    return radii;
}

std::vector<double> distances(const NetworkRealization &real, const Point2 &user)
{
    std::vector<double> r;
    r.reserve(real.ap_positions.size());
    for (const auto &p : real.ap_positions)
        r.push_back(distance(p, user));
    return r;
}

Point2 random_point_at_distance(double dist, Rng &rng)
{
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    return {dist * std::cos(phi), dist * std::sin(phi)};
}

} // namespace cfmimo
