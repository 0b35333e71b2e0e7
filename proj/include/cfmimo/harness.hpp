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

#ifndef CFMIMO_HARNESS_HPP
#define CFMIMO_HARNESS_HPP

#include "cfmimo/geometry.hpp"
#include "cfmimo/propagation.hpp"
#include "cfmimo/rates.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cfmimo
{

/// Invalid or incomplete experiment configuration.
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind
{
    ChannelGainCdf,
    HardeningCdf,
    FavorableCdf,
    RatesUplink,
    RatesDownlink,
    MomentsCheck
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string &text);

/// Fully resolved parameters for one curve of an experiment.
struct ParamSet
{
    std::string id;
    unsigned n_per_ap = 1;
    double lambda_per_m2 = 0.0;  // PPP experiments
    std::size_t num_aps = 0;     // fixed-L experiments (rates)
    double alpha = 3.76;
    double shadow_sigma_db = -1.0; // < 0: shadowing disabled
    double user_distance_m = 70.0;
    PropagationModel model = PropagationModel::single_slope(3.76);
};

/// Everything needed to run one experiment. Keys of the flat text format
/// match the member names; list-valued keys take comma-separated values and
/// expand as a cartesian product unless explicit `set` lines are given.
struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::HardeningCdf;
    std::string name = "experiment";

    Region::Shape region_shape = Region::Shape::Disk;
    double region_size_m = 500.0;

    // Sweepable
    std::vector<unsigned> n_per_ap{1};
    std::vector<double> lambda_per_km2;
    std::vector<double> antenna_density_per_km2; // lambda = mu / N when given
    std::vector<double> alpha{3.76};
    std::vector<double> shadow_sigma_db;         // empty: no shadowing
    std::vector<double> user_distance_m{70.0};

    // Explicit parameter sets: each entry maps sweepable keys to one value.
    std::vector<std::map<std::string, std::string>> explicit_sets;

    // Fixed-L deployments (rates): L = total_antennas / N
    std::optional<std::size_t> total_antennas;

    std::string pathloss = "single"; // single | three
    double d0_m = 10.0;
    double d1_m = 50.0;
    std::optional<double> c_db;      // three-slope constant; derived from the link budget when unset
    double carrier_mhz = 1900.0;
    double h_ap_m = 15.0;
    double h_user_m = 1.65;
    double shadow_cutoff_m = 50.0;

    RateScenario scenario;

    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 1;

    std::optional<double> grid_lo;
    std::optional<double> grid_hi;
    std::size_t grid_points = 200;

    // Stratified shot-noise estimator used by moments-check
    double inner_radius_m = 5.0;
    std::size_t inner_replicates = 1000;

    // Keys a preset could not fill because the source leaves them open
    std::vector<std::string> required_overrides;

    /// Sets one key from text. Throws ConfigError on unknown keys or bad values.
    void set(const std::string &key, const std::string &value);

    /// Resolved parameter sets, in output order.
    std::vector<ParamSet> param_sets() const;

    /// Throws ConfigError describing the first problem found.
    void validate() const;

    Region region() const;
    double three_slope_c_db() const;

    /// Flat text form, parseable by parse_config(). Excludes `workers`.
    std::string to_text() const;
};

ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config(const std::filesystem::path &path);

struct ResultRow
{
    std::string param_set_id;
    double x = 0.0;
    double value = 0.0;
    std::optional<double> std_error;
};

/// CSV payload plus metadata. Wall time is kept out of the CSV so identical
/// (config, seed) pairs give identical bytes.
struct ResultTable
{
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<ResultRow> rows;
    double wall_time_s = 0.0;

    std::string to_csv() const;
    void write_csv(const std::filesystem::path &path) const;
};

/// Runs all trials of all parameter sets. Trial t of set s draws from the
/// stream derived from (seed, s, t), so the output does not depend on the
/// worker count. Module errors are rethrown with the trial index attached.
ResultTable run(const ExperimentConfig &config);

/// Per-trial raw samples for the CDF experiments (one vector per param set).
struct SampleRun
{
    std::vector<ParamSet> sets;
    std::vector<std::vector<double>> samples;
    std::vector<std::size_t> rejections; // empty realizations resampled
};

SampleRun run_samples(const ExperimentConfig &config);

/// Per-user rates for the rate experiments, one entry per param set.
struct RateRun
{
    std::vector<ParamSet> sets;
    std::vector<std::vector<RateResults>> realizations;
};

RateRun run_rates(const ExperimentConfig &config);

/// Monte-Carlo shot-noise moments with radial stratification: the PPP in the
/// disk is split into an inner disk (radius `inner_radius_m`, redrawn
/// `inner_replicates` times per trial) and the outer annulus (drawn once).
/// Independence of the two parts makes means and variances add.
struct ShotNoiseEstimate
{
    struct Moment
    {
        double value = 0.0;
        double std_error = 0.0;
    };
    Moment mean_g2, var_g2, mean_y1, var_y1, mean_y1sq, mean_y2;
    // Plain estimator from one full realization per trial (first inner replicate)
    Moment naive_mean_g2, naive_var_g2;
    std::size_t trials = 0;
};

ShotNoiseEstimate estimate_shot_noise(double lambda_per_m2, unsigned n_per_ap, double alpha, double rho_m,
                                      std::size_t trials, double inner_radius_m, std::size_t inner_replicates,
                                      std::uint64_t seed, unsigned workers, std::uint64_t stream = 0);

/// Figure presets.
std::vector<std::string> preset_ids();
ExperimentConfig preset(const std::string &figure_id);
std::string preset_summary(const std::string &figure_id);

} // namespace cfmimo

#endif
