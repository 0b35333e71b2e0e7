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

#ifndef CFMIMO_GEOMETRY_HPP
#define CFMIMO_GEOMETRY_HPP

#include "cfmimo/random.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace cfmimo
{

struct Point2
{
    double x = 0.0; // meters
    double y = 0.0; // meters

    friend bool operator==(const Point2 &, const Point2 &) = default;
};

double distance(const Point2 &a, const Point2 &b);

/// Network region centered at the origin: a disk of radius `size` or a
/// square of side `size` (meters).
class Region
{
  public:
    enum class Shape
    {
        Disk,
        Square
    };

    static Region disk(double radius_m);
    static Region square(double side_m);

    Shape shape() const noexcept { return shape_; }
    double size() const noexcept { return size_; }
    double area() const;
    bool contains(const Point2 &p) const;
    Point2 sample_point(Rng &rng) const; // uniform over the region

    std::string describe() const;

  private:
    Region(Shape shape, double size) : shape_(shape), size_(size) {}

    Shape shape_;
    double size_;
};

/// One spatial draw: AP positions plus the number of co-located antennas per AP.
struct NetworkRealization
{
    std::vector<Point2> ap_positions;
    unsigned n_per_ap = 1;
    Region region = Region::disk(1.0);

    std::size_t num_aps() const noexcept { return ap_positions.size(); }
    std::size_t num_antennas() const noexcept { return ap_positions.size() * n_per_ap; }
    bool empty() const noexcept { return ap_positions.empty(); }
};

/// Homogeneous PPP with intensity `lambda_per_m2` on `region`.
NetworkRealization sample_ppp(const Region &region, double lambda_per_m2, unsigned n_per_ap, Rng &rng);

/// Exactly `num_aps` APs, i.i.d. uniform over `region`.
NetworkRealization sample_uniform_fixed(const Region &region, std::size_t num_aps, unsigned n_per_ap, Rng &rng);

/// Distances (m) of a homogeneous PPP restricted to the annulus
/// r_inner <= r < r_outer around the origin. Only radii are returned; the
/// angles are irrelevant for a user at the origin.
std::vector<double> sample_ppp_annulus_radii(double r_inner, double r_outer, double lambda_per_m2, Rng &rng);

/// Euclidean distance from every AP to `user`, in AP order.
std::vector<double> distances(const NetworkRealization &real, const Point2 &user);

/// Point at `dist` from the origin in a uniformly random direction.
Point2 random_point_at_distance(double dist, Rng &rng);

} // namespace cfmimo

#endif
