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

#include "cfmimo/harness.hpp"

#include "cfmimo/analytics.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#ifndef CFMIMO_GIT_DESCRIBE
#define CFMIMO_GIT_DESCRIBE "unknown"
#endif

namespace cfmimo
{

namespace
{

// ---- text helpers ------------------------------------------------------

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

double parse_double(const std::string &key, const std::string &text)
{
    double v = 0.0;
    const auto *first = text.data();
    const auto *last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ConfigError("Invalid number for '" + key + "': '" + text + "'.");
    return v;
}

std::uint64_t parse_uint(const std::string &key, const std::string &text)
{
    std::uint64_t v = 0;
    const auto *first = text.data();
    const auto *last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ConfigError("Invalid non-negative integer for '" + key + "': '" + text + "'.");
    return v;
}

std::vector<double> parse_double_list(const std::string &key, const std::string &text)
{
    std::vector<double> out;
    for (const auto &item : split(text, ','))
        out.push_back(parse_double(key, item));
    return out;
}

std::vector<unsigned> parse_unsigned_list(const std::string &key, const std::string &text)
{
    std::vector<unsigned> out;
    for (const auto &item : split(text, ','))
        out.push_back(static_cast<unsigned>(parse_uint(key, item)));
    return out;
}

// Shortest text that round-trips through from_chars
std::string num(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

template <class T> std::string join(const std::vector<T> &v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (i)
            out += ",";
        if constexpr (std::is_floating_point_v<T>)
            out += num(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out;
}

std::uint64_t fnv1a(const std::string &s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Sweepable keys, in the order they appear in parameter-set ids
const std::vector<std::string> &sweep_keys()
{
    static const std::vector<std::string> keys{"n_per_ap",        "lambda_per_km2",  "antenna_density_per_km2",
                                               "alpha",           "shadow_sigma_db", "user_distance_m"};
    return keys;
}

const std::map<std::string, std::string> &short_names()
{
    static const std::map<std::string, std::string> names{
        {"n_per_ap", "N"},           {"lambda_per_km2", "lambda_per_km2"}, {"antenna_density_per_km2", "mu_per_km2"},
        {"alpha", "alpha"},          {"shadow_sigma_db", "sigma_db"},      {"user_distance_m", "distance_m"}};
    return names;
}

bool is_ppp_kind(ExperimentKind k)
{
    return k == ExperimentKind::ChannelGainCdf || k == ExperimentKind::HardeningCdf ||
           k == ExperimentKind::FavorableCdf || k == ExperimentKind::MomentsCheck;
}

bool is_rate_kind(ExperimentKind k)
{
    return k == ExperimentKind::RatesUplink || k == ExperimentKind::RatesDownlink;
}

// ---- deterministic parallel loop ---------------------------------------

// Calls fn(i) for i in [0, n) on `workers` threads. Each index writes only
// its own output slot, so the result is independent of scheduling. The
// exception from the lowest failing index is rethrown with that index.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)> &fn)
{
    struct Failure
    {
        std::size_t index;
        std::string what;
    };
    std::optional<Failure> failure;
    std::mutex mtx;
    std::atomic<std::size_t> next{0};

    auto body = [&] {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                fn(i);
            }
            catch (const std::exception &e)
            {
                std::lock_guard lock(mtx);
                if (!failure || i < failure->index)
                    failure = Failure{i, e.what()};
            }
        }
    };

    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (w == 1)
        body();
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(w);
        for (unsigned t = 0; t < w; ++t)
            pool.emplace_back(body);
    }
    if (failure)
        throw std::runtime_error("trial " + std::to_string(failure->index) + ": " + failure->what);
}

// ---- one trial of each CDF experiment ----------------------------------

struct TrialValue
{
    double value = 0.0;
    std::size_t rejections = 0;
};

TrialValue sample_trial(const ExperimentConfig &cfg, const Region &region, const ParamSet &ps, Rng &rng)
{
    TrialValue out;
    std::vector<Point2> users{{0.0, 0.0}};
    if (cfg.kind == ExperimentKind::FavorableCdf)
        users.push_back(random_point_at_distance(ps.user_distance_m, rng));

    // Typical user served by at least one AP; empty draws are resampled
    NetworkRealization real = sample_ppp(region, ps.lambda_per_m2, ps.n_per_ap, rng);
    while (real.empty())
    {
        ++out.rejections;
        if (out.rejections > 100000)
            throw std::runtime_error("AP intensity too low: no AP in 100000 consecutive realizations.");
        real = sample_ppp(region, ps.lambda_per_m2, ps.n_per_ap, rng);
    }
    const LargeScaleProfile profile = large_scale_profile(real, users, ps.model, rng);

    switch (cfg.kind)
    {
    case ExperimentKind::ChannelGainCdf:
        out.value = channel_gain(profile, draw_gamma_sums(profile.num_aps(), ps.n_per_ap, rng), 0);
        break;
    case ExperimentKind::HardeningCdf:
        out.value = x_ch(profile, 0);
        break;
    case ExperimentKind::FavorableCdf:
        out.value = x_fp(profile, 0, 1);
        break;
    default:
        throw std::logic_error("Not a sample experiment.");
    }
    return out;
}

// ---- stratified shot-noise statistics ----------------------------------

// Power sums of a sample, for mean / variance and their standard errors
struct PowerSums
{
    double n = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;

    void add(double x)
    {
        const double x2 = x * x;
        n += 1.0;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
    }
    void merge(const PowerSums &o)
    {
        n += o.n;
        s1 += o.s1;
        s2 += o.s2;
        s3 += o.s3;
        s4 += o.s4;
    }
    double mean() const { return s1 / n; }
    double var() const { return (s2 - s1 * s1 / n) / (n - 1.0); }
    double mean_se() const { return std::sqrt(std::max(var(), 0.0) / n); }
    // Large-sample standard error of the sample variance: sqrt((m4 - s^4) / n)
    double var_se() const
    {
        const double m = mean();
        const double m4 = s4 / n - 4.0 * m * s3 / n + 6.0 * m * m * s2 / n - 3.0 * m * m * m * m;
        const double v = s2 / n - m * m;
        return std::sqrt(std::max(m4 - v * v, 0.0) / n);
    }
};

struct StratumTrial
{
    double outer_g = 0.0, outer_y1 = 0.0, outer_y2 = 0.0;
    PowerSums inner_g, inner_y1;
    double inner_y2 = 0.0;
    double naive_g = 0.0;
};

} // namespace

// ---- kinds ---------------------------------------------------------------

std::string to_string(ExperimentKind kind)
{
    switch (kind)
    {
    case ExperimentKind::ChannelGainCdf:
        return "channel-gain-cdf";
    case ExperimentKind::HardeningCdf:
        return "hardening-cdf";
    case ExperimentKind::FavorableCdf:
        return "favorable-cdf";
    case ExperimentKind::RatesUplink:
        return "rates-ul";
    case ExperimentKind::RatesDownlink:
        return "rates-dl";
    case ExperimentKind::MomentsCheck:
        return "moments-check";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string &text)
{
    for (auto k : {ExperimentKind::ChannelGainCdf, ExperimentKind::HardeningCdf, ExperimentKind::FavorableCdf,
                   ExperimentKind::RatesUplink, ExperimentKind::RatesDownlink, ExperimentKind::MomentsCheck})
        if (to_string(k) == text)
            return k;
    throw ConfigError("Unknown experiment kind '" + text +
                      "' (expected channel-gain-cdf, hardening-cdf, favorable-cdf, rates-ul, rates-dl or "
                      "moments-check).");
}

// ---- configuration -------------------------------------------------------

void ExperimentConfig::set(const std::string &key_in, const std::string &value_in)
{
    const std::string key = trim(key_in);
    const std::string value = trim(value_in);

    // A key given explicitly satisfies a preset's open requirement
    std::erase(required_overrides, key);

    if (key == "experiment")
        kind = parse_experiment_kind(value);
    else if (key == "name")
    {
        if (value.empty() || value.find_first_of(",\n\"") != std::string::npos)
            throw ConfigError("Experiment name must be non-empty and free of commas and quotes.");
        name = value;
    }
    else if (key == "region")
    {
        if (value == "disk")
            region_shape = Region::Shape::Disk;
        else if (value == "square")
            region_shape = Region::Shape::Square;
        else
            throw ConfigError("Region must be 'disk' or 'square'.");
    }
    else if (key == "region_size_m")
        region_size_m = parse_double(key, value);
    else if (key == "n_per_ap")
        n_per_ap = parse_unsigned_list(key, value);
    else if (key == "lambda_per_km2")
        lambda_per_km2 = parse_double_list(key, value);
    else if (key == "antenna_density_per_km2")
        antenna_density_per_km2 = parse_double_list(key, value);
    else if (key == "alpha")
        alpha = parse_double_list(key, value);
    else if (key == "shadow_sigma_db")
        shadow_sigma_db = parse_double_list(key, value);
    else if (key == "user_distance_m")
        user_distance_m = parse_double_list(key, value);
    else if (key == "set")
    {
        std::map<std::string, std::string> entry;
        for (const auto &kv : split(value, ' '))
        {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("Parameter set entries must be key=value, got '" + kv + "'.");
            const auto k = kv.substr(0, eq);
            if (std::find(sweep_keys().begin(), sweep_keys().end(), k) == sweep_keys().end())
                throw ConfigError("Key '" + k + "' cannot appear in a parameter set.");
            entry[k] = kv.substr(eq + 1);
        }
        if (entry.empty())
            throw ConfigError("Empty parameter set.");
        explicit_sets.push_back(std::move(entry));
    }
    else if (key == "total_antennas")
        total_antennas = parse_uint(key, value);
    else if (key == "pathloss")
    {
        if (value != "single" && value != "three")
            throw ConfigError("Pathloss must be 'single' or 'three'.");
        pathloss = value;
    }
    else if (key == "d0_m")
        d0_m = parse_double(key, value);
    else if (key == "d1_m")
        d1_m = parse_double(key, value);
    else if (key == "c_db")
    {
        if (value == "auto")
            c_db.reset();
        else
            c_db = parse_double(key, value);
    }
    else if (key == "carrier_mhz")
        carrier_mhz = parse_double(key, value);
    else if (key == "h_ap_m")
        h_ap_m = parse_double(key, value);
    else if (key == "h_user_m")
        h_user_m = parse_double(key, value);
    else if (key == "shadow_cutoff_m")
        shadow_cutoff_m = parse_double(key, value);
    else if (key == "num_users")
        scenario.num_users = parse_uint(key, value);
    else if (key == "tau_c")
        scenario.tau_c = parse_uint(key, value);
    else if (key == "tau_p")
        scenario.tau_p = parse_uint(key, value);
    else if (key == "pilot_power_mw")
        scenario.pilot_power_mw = parse_double(key, value);
    else if (key == "data_power_mw")
        scenario.data_power_mw = parse_double(key, value);
    else if (key == "dl_power_mw")
        scenario.dl_power_mw = parse_double(key, value);
    else if (key == "fading_draws")
        scenario.fading_draws = parse_uint(key, value);
    else if (key == "max_relative_stderr")
        scenario.max_relative_stderr = parse_double(key, value);
    else if (key == "trials")
        trials = parse_uint(key, value);
    else if (key == "seed")
        seed = parse_uint(key, value);
    else if (key == "workers")
        workers = static_cast<unsigned>(parse_uint(key, value));
    else if (key == "grid_lo")
        grid_lo = parse_double(key, value);
    else if (key == "grid_hi")
        grid_hi = parse_double(key, value);
    else if (key == "grid_points")
        grid_points = parse_uint(key, value);
    else if (key == "inner_radius_m")
        inner_radius_m = parse_double(key, value);
    else if (key == "inner_replicates")
        inner_replicates = parse_uint(key, value);
    else if (key == "required")
    {
        // A key that must be supplied later (file or CLI) before running
        if (std::find(required_overrides.begin(), required_overrides.end(), value) == required_overrides.end())
            required_overrides.push_back(value);
    }
    else
        throw ConfigError("Unknown configuration key '" + key + "'.");
}

Region ExperimentConfig::region() const
{
    return region_shape == Region::Shape::Disk ? Region::disk(region_size_m) : Region::square(region_size_m);
}

double ExperimentConfig::three_slope_c_db() const
{
    return c_db ? *c_db : constant_c_db(carrier_mhz, h_ap_m, h_user_m);
}

std::vector<ParamSet> ExperimentConfig::param_sets() const
{
    // Each combination is a map key -> text; resolution below is shared by
    // the cartesian and explicit forms.
    std::vector<std::map<std::string, std::string>> combos;
    std::set<std::string> labelled;

    if (!explicit_sets.empty())
    {
        combos = explicit_sets;
        for (const auto &c : combos)
            for (const auto &[k, v] : c)
                labelled.insert(k);
    }
    else
    {
        const std::vector<std::pair<std::string, std::vector<std::string>>> axes{
            {"n_per_ap", [&] {
                 std::vector<std::string> v;
                 for (auto x : n_per_ap)
                     v.push_back(std::to_string(x));
                 return v;
             }()},
            {"lambda_per_km2", [&] {
                 std::vector<std::string> v;
                 for (auto x : lambda_per_km2)
                     v.push_back(num(x));
                 return v;
             }()},
            {"antenna_density_per_km2", [&] {
                 std::vector<std::string> v;
                 for (auto x : antenna_density_per_km2)
                     v.push_back(num(x));
                 return v;
             }()},
            {"alpha", [&] {
                 std::vector<std::string> v;
                 for (auto x : alpha)
                     v.push_back(num(x));
                 return v;
             }()},
            {"shadow_sigma_db", [&] {
                 std::vector<std::string> v;
                 for (auto x : shadow_sigma_db)
                     v.push_back(num(x));
                 return v;
             }()},
            {"user_distance_m", [&] {
                 std::vector<std::string> v;
                 for (auto x : user_distance_m)
                     v.push_back(num(x));
                 return v;
             }()},
        };
        combos.emplace_back();
        for (const auto &[key, values] : axes)
        {
            if (values.empty())
                continue;
            if (values.size() > 1)
                labelled.insert(key);
            std::vector<std::map<std::string, std::string>> next;
            for (const auto &c : combos)
                for (const auto &v : values)
                {
                    auto e = c;
                    e[key] = v;
                    next.push_back(std::move(e));
                }
            combos = std::move(next);
        }
    }

    auto first_or = [](const auto &list, auto fallback) { return list.empty() ? fallback : list.front(); };

    std::vector<ParamSet> sets;
    for (const auto &c : combos)
    {
        auto get = [&](const std::string &k) -> std::optional<std::string> {
            const auto it = c.find(k);
            return it == c.end() ? std::nullopt : std::optional<std::string>(it->second);
        };

        ParamSet ps;
        ps.n_per_ap = get("n_per_ap") ? static_cast<unsigned>(parse_uint("n_per_ap", *get("n_per_ap")))
                                      : first_or(n_per_ap, 1u);
        if (ps.n_per_ap == 0)
            throw ConfigError("n_per_ap must be positive.");
        ps.alpha = get("alpha") ? parse_double("alpha", *get("alpha")) : first_or(alpha, 3.76);
        ps.shadow_sigma_db = get("shadow_sigma_db") ? parse_double("shadow_sigma_db", *get("shadow_sigma_db"))
                                                    : first_or(shadow_sigma_db, -1.0);
        ps.user_distance_m = get("user_distance_m") ? parse_double("user_distance_m", *get("user_distance_m"))
                                                    : first_or(user_distance_m, 70.0);

        // Density: explicit lambda wins; otherwise lambda = mu / N
        const auto lam = get("lambda_per_km2");
        const auto mu = get("antenna_density_per_km2");
        if (lam)
            ps.lambda_per_m2 = parse_double("lambda_per_km2", *lam) * 1e-6;
        else if (mu)
            ps.lambda_per_m2 = parse_double("antenna_density_per_km2", *mu) * 1e-6 / ps.n_per_ap;
        else if (!lambda_per_km2.empty())
            ps.lambda_per_m2 = lambda_per_km2.front() * 1e-6;
        else if (!antenna_density_per_km2.empty())
            ps.lambda_per_m2 = antenna_density_per_km2.front() * 1e-6 / ps.n_per_ap;

        if (total_antennas)
        {
            if (*total_antennas % ps.n_per_ap != 0)
                throw ConfigError("total_antennas must be divisible by n_per_ap.");
            ps.num_aps = *total_antennas / ps.n_per_ap;
        }

        if (pathloss == "three")
            ps.model = PropagationModel::three_slope(d0_m, d1_m, three_slope_c_db());
        else
        {
            if (ps.alpha == 1.0)
                throw ConfigError("Pathloss exponent 1 is outside the model (alpha must exceed 1).");
            if (!(ps.alpha > 1.0))
                throw ConfigError("Pathloss exponent must exceed 1.");
            ps.model = PropagationModel::single_slope(ps.alpha);
        }
        if (ps.shadow_sigma_db >= 0.0)
            ps.model = ps.model.with_shadowing(ps.shadow_sigma_db, shadow_cutoff_m);

        std::string id;
        for (const auto &k : sweep_keys())
        {
            const auto v = get(k);
            if (!v || !labelled.count(k))
                continue;
            if (!id.empty())
                id += ";";
            id += short_names().at(k) + "=" + *v;
        }
        ps.id = id.empty() ? "default" : id;
        sets.push_back(std::move(ps));
    }
    return sets;
}

void ExperimentConfig::validate() const
{
    if (!required_overrides.empty())
    {
        std::string keys;
        for (const auto &k : required_overrides)
            keys += (keys.empty() ? "" : ", ") + k;
        throw ConfigError("Missing required parameter(s) not fixed by this preset: " + keys + ".");
    }
    if (trials == 0)
        throw ConfigError("trials must be positive.");
    if (!(region_size_m > 0.0))
        throw ConfigError("region_size_m must be positive.");
    if (grid_points < 2)
        throw ConfigError("grid_points must be at least 2.");
    if (grid_lo && grid_hi && !(*grid_lo > 0.0 && *grid_hi > *grid_lo))
        throw ConfigError("Grid bounds need 0 < grid_lo < grid_hi.");

    if (is_ppp_kind(kind) && lambda_per_km2.empty() && antenna_density_per_km2.empty())
    {
        bool every_set_has_density = !explicit_sets.empty();
        for (const auto &s : explicit_sets)
            every_set_has_density &= s.count("lambda_per_km2") || s.count("antenna_density_per_km2");
        if (!every_set_has_density)
            throw ConfigError("AP density is required: set lambda_per_km2 or antenna_density_per_km2.");
    }
    if (is_rate_kind(kind))
    {
        if (!total_antennas)
            throw ConfigError("Rate experiments need total_antennas (L = total_antennas / n_per_ap).");
        scenario.validate();
    }
    if (kind == ExperimentKind::MomentsCheck)
    {
        if (pathloss != "single" || region_shape != Region::Shape::Disk)
            throw ConfigError("moments-check needs the single-slope law on a disk.");
        if (!(inner_radius_m > 0.0) || !(inner_radius_m < region_size_m) || inner_replicates == 0)
            throw ConfigError("moments-check needs 0 < inner_radius_m < region_size_m and inner_replicates > 0.");
        if (!shadow_sigma_db.empty())
            throw ConfigError("moments-check has no closed form with shadowing.");
    }
    for (const auto &ps : param_sets())
    {
        if (is_ppp_kind(kind) && !(ps.lambda_per_m2 > 0.0))
            throw ConfigError("AP density must be positive in parameter set '" + ps.id + "'.");
        if (kind == ExperimentKind::FavorableCdf && !(ps.user_distance_m >= 0.0))
            throw ConfigError("user_distance_m must be non-negative.");
        if (is_rate_kind(kind) && ps.num_aps == 0)
            throw ConfigError("Rate experiments need at least one AP.");
    }
}

std::string ExperimentConfig::to_text() const
{
    std::ostringstream os;
    os << "experiment = " << to_string(kind) << "\n";
    os << "name = " << name << "\n";
    os << "region = " << (region_shape == Region::Shape::Disk ? "disk" : "square") << "\n";
    os << "region_size_m = " << num(region_size_m) << "\n";
    os << "n_per_ap = " << join(n_per_ap) << "\n";
    if (!lambda_per_km2.empty())
        os << "lambda_per_km2 = " << join(lambda_per_km2) << "\n";
    if (!antenna_density_per_km2.empty())
        os << "antenna_density_per_km2 = " << join(antenna_density_per_km2) << "\n";
    os << "alpha = " << join(alpha) << "\n";
    if (!shadow_sigma_db.empty())
        os << "shadow_sigma_db = " << join(shadow_sigma_db) << "\n";
    os << "user_distance_m = " << join(user_distance_m) << "\n";
    for (const auto &s : explicit_sets)
    {
        os << "set =";
        for (const auto &k : sweep_keys())
            if (s.count(k))
                os << " " << k << "=" << s.at(k);
        os << "\n";
    }
    if (total_antennas)
        os << "total_antennas = " << *total_antennas << "\n";
    os << "pathloss = " << pathloss << "\n";
    os << "d0_m = " << num(d0_m) << "\n";
    os << "d1_m = " << num(d1_m) << "\n";
    os << "c_db = " << (c_db ? num(*c_db) : std::string("auto")) << "\n";
    os << "carrier_mhz = " << num(carrier_mhz) << "\n";
    os << "h_ap_m = " << num(h_ap_m) << "\n";
    os << "h_user_m = " << num(h_user_m) << "\n";
    os << "shadow_cutoff_m = " << num(shadow_cutoff_m) << "\n";
    os << "num_users = " << scenario.num_users << "\n";
    os << "tau_c = " << scenario.tau_c << "\n";
    os << "tau_p = " << scenario.tau_p << "\n";
    os << "pilot_power_mw = " << num(scenario.pilot_power_mw) << "\n";
    os << "data_power_mw = " << num(scenario.data_power_mw) << "\n";
    os << "dl_power_mw = " << num(scenario.dl_power_mw) << "\n";
    os << "fading_draws = " << scenario.fading_draws << "\n";
    os << "max_relative_stderr = " << num(scenario.max_relative_stderr) << "\n";
    os << "trials = " << trials << "\n";
    os << "seed = " << seed << "\n";
    if (grid_lo)
        os << "grid_lo = " << num(*grid_lo) << "\n";
    if (grid_hi)
        os << "grid_hi = " << num(*grid_hi) << "\n";
    os << "grid_points = " << grid_points << "\n";
    os << "inner_radius_m = " << num(inner_radius_m) << "\n";
    os << "inner_replicates = " << inner_replicates << "\n";
    for (const auto &k : required_overrides)
        os << "required = " << k << "\n";
    return os.str();
}

ExperimentConfig parse_config(const std::string &text)
{
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'.");
        try
        {
            cfg.set(line.substr(0, eq), line.substr(eq + 1));
        }
        catch (const ConfigError &e)
        {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("Cannot open config file '" + path.string() + "'.");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---- CSV -------------------------------------------------------------------

std::string ResultTable::to_csv() const
{
    bool with_stderr = false;
    for (const auto &r : rows)
        with_stderr |= r.std_error.has_value();

    std::string out;
    for (const auto &[k, v] : metadata)
        out += "# " + k + "=" + v + "\n";
    out += with_stderr ? "experiment,param_set_id,x,value,stderr\n" : "experiment,param_set_id,x,value\n";
    for (const auto &r : rows)
    {
        out += experiment;
        out += ",";
        out += r.param_set_id;
        out += ",";
        out += num(r.x);
        out += ",";
        out += num(r.value);
        if (with_stderr)
        {
            out += ",";
            if (r.std_error)
                out += num(*r.std_error);
        }
        out += "\n";
    }
    return out;
}

void ResultTable::write_csv(const std::filesystem::path &path) const
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("Cannot write '" + path.string() + "'.");
    out << to_csv();
}

// ---- runners ---------------------------------------------------------------

SampleRun run_samples(const ExperimentConfig &config)
{
    config.validate();
    if (is_rate_kind(config.kind) || config.kind == ExperimentKind::MomentsCheck)
        throw ConfigError("run_samples handles the CDF experiments only.");

    SampleRun out;
    out.sets = config.param_sets();
    const Region region = config.region();
    for (std::size_t s = 0; s < out.sets.size(); ++s)
    {
        std::vector<TrialValue> trials(config.trials);
        parallel_for(config.trials, config.workers, [&](std::size_t t) {
            Rng rng = Rng::derive(config.seed, {s, t});
            trials[t] = sample_trial(config, region, out.sets[s], rng);
        });
        std::vector<double> values(config.trials);
        std::size_t rejections = 0;
        for (std::size_t t = 0; t < config.trials; ++t)
        {
            values[t] = trials[t].value;
            rejections += trials[t].rejections;
        }
        out.samples.push_back(std::move(values));
        out.rejections.push_back(rejections);
    }
    return out;
}

RateRun run_rates(const ExperimentConfig &config)
{
    config.validate();
    if (!is_rate_kind(config.kind))
        throw ConfigError("run_rates handles the rate experiments only.");

    RateRun out;
    out.sets = config.param_sets();
    const Region region = config.region();
    for (std::size_t s = 0; s < out.sets.size(); ++s)
    {
        const ParamSet &ps = out.sets[s];
        std::vector<RateResults> results(config.trials);
        parallel_for(config.trials, config.workers, [&](std::size_t t) {
            Rng rng = Rng::derive(config.seed, {s, t});
            const auto real = sample_uniform_fixed(region, ps.num_aps, ps.n_per_ap, rng);
            std::vector<Point2> users(config.scenario.num_users);
            for (auto &u : users)
                u = region.sample_point(rng);
            const auto profile = large_scale_profile(real, users, ps.model, rng);
            results[t] = RateSimulator(profile, config.scenario).run(rng);
        });
        out.realizations.push_back(std::move(results));
    }
    return out;
}

ShotNoiseEstimate estimate_shot_noise(double lambda_per_m2, unsigned n_per_ap, double alpha, double rho_m,
                                      std::size_t trials, double inner_radius_m, std::size_t inner_replicates,
                                      std::uint64_t seed, unsigned workers, std::uint64_t stream)
{
    if (trials < 2 || inner_replicates == 0)
        throw std::invalid_argument("Shot-noise estimate needs at least two trials and one inner replicate.");
    if (!(inner_radius_m > 0.0) || !(inner_radius_m < rho_m))
        throw std::invalid_argument("Inner radius must lie in (0, rho).");
    if (!(lambda_per_m2 > 0.0) || n_per_ap == 0)
        throw std::invalid_argument("Shot-noise estimate needs lambda > 0 and N >= 1.");

    const auto model = PropagationModel::single_slope(alpha);
    const double inner_mean = lambda_per_m2 * std::numbers::pi * inner_radius_m * inner_radius_m;
    const double m = static_cast<double>(inner_replicates);

    std::vector<StratumTrial> per_trial(trials);
    parallel_for(trials, workers, [&](std::size_t t) {
        Rng rng = Rng::derive(seed, {stream, t});
        StratumTrial st;

        for (double r : sample_ppp_annulus_radii(inner_radius_m, rho_m, lambda_per_m2, rng))
        {
            const double l = model.gain(r);
            st.outer_g += rng.gamma_int(n_per_ap) * l;
            st.outer_y1 += l;
            st.outer_y2 += l * l;
        }

        // All inner replicates at once: a Poisson(m * mean) pool split
        // uniformly over replicates gives m independent Poisson(mean) draws.
        struct Point
        {
            std::size_t replicate;
            double g, l;
        };
        std::vector<Point> pts(rng.poisson(m * inner_mean));
        for (auto &p : pts)
        {
            p.replicate = std::min(static_cast<std::size_t>(rng.uniform() * m), inner_replicates - 1);
            const double r = inner_radius_m * std::sqrt(rng.uniform());
            p.l = model.gain(r);
            p.g = rng.gamma_int(n_per_ap) * p.l;
        }
        std::stable_sort(pts.begin(), pts.end(),
                         [](const Point &a, const Point &b) { return a.replicate < b.replicate; });

        double first_g = 0.0;
        std::size_t nonempty = 0;
        for (std::size_t i = 0; i < pts.size();)
        {
            double g = 0.0, y1 = 0.0;
            const std::size_t rep = pts[i].replicate;
            for (; i < pts.size() && pts[i].replicate == rep; ++i)
            {
                g += pts[i].g;
                y1 += pts[i].l;
                st.inner_y2 += pts[i].l * pts[i].l;
            }
            if (rep == 0)
                first_g = g;
            st.inner_g.add(g);
            st.inner_y1.add(y1);
            ++nonempty;
        }
        // Empty replicates contribute zeros to every power sum
        st.inner_g.n += m - static_cast<double>(nonempty);
        st.inner_y1.n += m - static_cast<double>(nonempty);
        st.naive_g = st.outer_g + first_g;
        per_trial[t] = st;
    });

    // Serial, index-ordered reduction keeps the result worker-independent
    PowerSums og, oy1, oy2, ig, iy1, naive;
    double iy2 = 0.0;
    for (const auto &st : per_trial)
    {
        og.add(st.outer_g);
        oy1.add(st.outer_y1);
        oy2.add(st.outer_y2);
        ig.merge(st.inner_g);
        iy1.merge(st.inner_y1);
        iy2 += st.inner_y2;
        naive.add(st.naive_g);
    }

    auto add_se = [](double a, double b) { return std::sqrt(a * a + b * b); };
    ShotNoiseEstimate e;
    e.trials = trials;
    e.mean_g2 = {og.mean() + ig.mean(), add_se(og.mean_se(), ig.mean_se())};
    e.var_g2 = {og.var() + ig.var(), add_se(og.var_se(), ig.var_se())};
    e.mean_y1 = {oy1.mean() + iy1.mean(), add_se(oy1.mean_se(), iy1.mean_se())};
    e.var_y1 = {oy1.var() + iy1.var(), add_se(oy1.var_se(), iy1.var_se())};
    e.mean_y1sq = {e.var_y1.value + e.mean_y1.value * e.mean_y1.value,
                   add_se(e.var_y1.std_error, 2.0 * e.mean_y1.value * e.mean_y1.std_error)};
    // Inner Y2 per replicate has tiny variance relative to its mean; its
    // standard error is dominated by the outer stratum's.
    e.mean_y2 = {oy2.mean() + iy2 / (static_cast<double>(trials) * m), oy2.mean_se()};
    e.naive_mean_g2 = {naive.mean(), naive.mean_se()};
    e.naive_var_g2 = {naive.var(), naive.var_se()};
    return e;
}

ResultTable run(const ExperimentConfig &config)
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    ResultTable table;
    table.experiment = config.name;
    table.metadata = {{"kind", to_string(config.kind)},
                      {"config_hash", hex64(fnv1a(config.to_text()))},
                      {"seed", std::to_string(config.seed)},
                      {"trials", std::to_string(config.trials)},
                      {"git_describe", CFMIMO_GIT_DESCRIBE}};

    switch (config.kind)
    {
    case ExperimentKind::ChannelGainCdf:
    case ExperimentKind::HardeningCdf:
    case ExperimentKind::FavorableCdf: {
        const bool gain = config.kind == ExperimentKind::ChannelGainCdf;
        const auto grid = log_grid(config.grid_lo.value_or(gain ? 1e-14 : 1e-6),
                                   config.grid_hi.value_or(gain ? 1e2 : 1.0), config.grid_points);
        const auto sr = run_samples(config);
        std::size_t rejections = 0;
        for (std::size_t s = 0; s < sr.sets.size(); ++s)
        {
            rejections += sr.rejections[s];
            const EmpiricalCdf cdf(sr.samples[s]);
            for (double x : grid)
                table.rows.push_back({sr.sets[s].id, x, cdf.query(x), cdf.standard_error(x)});
        }
        table.metadata.emplace_back("empty_realizations_resampled", std::to_string(rejections));
        break;
    }
    case ExperimentKind::RatesUplink:
    case ExperimentKind::RatesDownlink: {
        const bool ul = config.kind == ExperimentKind::RatesUplink;
        const auto rr = run_rates(config);
        std::size_t clamped = 0, unconverged = 0;
        for (std::size_t s = 0; s < rr.sets.size(); ++s)
        {
            const std::string id = rr.sets[s].id;
            const std::string sep = id == "default" ? "" : id + ";";
            // Rows grouped by bound; x is the user sample index
            auto emit = [&](const std::string &bound, auto &&get) {
                std::size_t x = 0;
                for (const auto &res : rr.realizations[s])
                    for (std::size_t k = 0; k < config.scenario.num_users; ++k, ++x)
                    {
                        const auto [v, se] = get(res, k);
                        table.rows.push_back({sep + "bound=" + bound, static_cast<double>(x), v, se});
                    }
            };
            using Opt = std::optional<double>;
            auto est = [&](const RateEstimate &e) {
                unconverged += e.converged ? 0 : 1;
                return std::pair<double, Opt>{e.value, e.std_error};
            };
            if (ul)
            {
                emit("uatf", [](const RateResults &r, std::size_t k) { return std::pair<double, Opt>{r.ul_uatf[k], {}}; });
                emit("general", [&](const RateResults &r, std::size_t k) { return est(r.ul_general[k]); });
                emit("perfect", [&](const RateResults &r, std::size_t k) { return est(r.ul_perfect[k]); });
            }
            else
            {
                emit("uatf", [](const RateResults &r, std::size_t k) { return std::pair<double, Opt>{r.dl_uatf[k], {}}; });
                emit("general", [&](const RateResults &r, std::size_t k) {
                    clamped += r.dl_general[k].clamped ? 1 : 0;
                    return est(r.dl_general[k].rate);
                });
                emit("perfect", [&](const RateResults &r, std::size_t k) { return est(r.dl_perfect[k]); });
                emit("first_term", [](const RateResults &r, std::size_t k) {
                    return std::pair<double, Opt>{r.dl_general[k].first_term, {}};
                });
                emit("penalty", [](const RateResults &r, std::size_t k) {
                    return std::pair<double, Opt>{r.dl_general[k].penalty, {}};
                });
            }
        }
        if (!ul)
            table.metadata.emplace_back("dl_general_clamped", std::to_string(clamped));
        table.metadata.emplace_back("unconverged_estimates", std::to_string(unconverged));
        break;
    }
    case ExperimentKind::MomentsCheck: {
        const auto sets = config.param_sets();
        for (std::size_t s = 0; s < sets.size(); ++s)
        {
            const auto &ps = sets[s];
            const auto e = estimate_shot_noise(ps.lambda_per_m2, ps.n_per_ap, ps.alpha, config.region_size_m,
                                               config.trials, config.inner_radius_m, config.inner_replicates,
                                               config.seed, config.workers, s);
            const auto g = lemma1_moments(ps.lambda_per_m2, ps.n_per_ap, ps.alpha, config.region_size_m);
            const auto y = lemma2_moments(ps.lambda_per_m2, ps.alpha, config.region_size_m);
            const std::string sep = ps.id == "default" ? "" : ps.id + ";";
            // x holds the closed form, value the Monte-Carlo estimate
            auto row = [&](const std::string &q, double closed, const ShotNoiseEstimate::Moment &mc) {
                table.rows.push_back({sep + "quantity=" + q, closed, mc.value, mc.std_error});
            };
            row("mean_g2", g.mean, e.mean_g2);
            row("var_g2", g.variance, e.var_g2);
            row("mean_y1", y.mean_y1, e.mean_y1);
            row("var_y1", y.var_y1, e.var_y1);
            row("mean_y1sq", y.mean_y1sq, e.mean_y1sq);
            row("mean_y2", y.mean_y2, e.mean_y2);
            row("mean_g2_naive", g.mean, e.naive_mean_g2);
            row("var_g2_naive", g.variance, e.naive_var_g2);
        }
        table.metadata.emplace_back("inner_radius_m", num(config.inner_radius_m));
        table.metadata.emplace_back("inner_replicates", std::to_string(config.inner_replicates));
        break;
    }
    }

    table.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return table;
}

// ---- presets -----------------------------------------------------------------

namespace
{

struct PresetEntry
{
    std::string id;
    std::string summary;
    std::function<ExperimentConfig()> make;
};

ExperimentConfig base(ExperimentKind kind, const std::string &name)
{
    ExperimentConfig c;
    c.kind = kind;
    c.name = name;
    c.region_shape = Region::Shape::Disk;
    c.region_size_m = 500.0;
    c.alpha = {3.76};
    c.trials = 10000;
    return c;
}

ExperimentConfig table_rates(ExperimentKind kind, const std::string &name, unsigned n)
{
    ExperimentConfig c = base(kind, name);
    c.region_shape = Region::Shape::Square;
    c.region_size_m = 1000.0;
    c.pathloss = "three";
    c.n_per_ap = {n};
    c.total_antennas = 100;
    c.trials = 300;
    c.scenario = RateScenario{};
    return c;
}

const std::vector<PresetEntry> &registry()
{
    static const std::vector<PresetEntry> entries{
        {"fig2", "channel-gain CDF, mu=1000/km2, N in {1,10,100}, disk 500 m, alpha=3.76",
         [] {
             auto c = base(ExperimentKind::ChannelGainCdf, "fig2");
             c.n_per_ap = {1, 10, 100};
             c.antenna_density_per_km2 = {1000.0};
             c.grid_lo = 1e-14;
             c.grid_hi = 1e2;
             c.grid_points = 321;
             return c;
         }},
        {"fig3", "X_ch CDF, alpha in {3.76,2}, lambda in {1e2,1e3,1e5}/km2, N=1, disk 500 m",
         [] {
             auto c = base(ExperimentKind::HardeningCdf, "fig3");
             c.alpha = {3.76, 2.0};
             c.lambda_per_km2 = {100.0, 1000.0, 100000.0};
             return c;
         }},
        {"fig4", "shadowed X_ch CDF, sigma in {0,5,10} dB, lambda=100/km2, alpha=3.76, N=1",
         [] {
             auto c = base(ExperimentKind::HardeningCdf, "fig4");
             c.lambda_per_km2 = {100.0};
             c.shadow_sigma_db = {0.0, 5.0, 10.0};
             return c;
         }},
        {"fig5", "X_ch CDF, mu=1000/km2, N in {1,5,10,20,50}",
         [] {
             auto c = base(ExperimentKind::HardeningCdf, "fig5");
             c.n_per_ap = {1, 5, 10, 20, 50};
             c.antenna_density_per_km2 = {1000.0};
             return c;
         }},
        {"fig6", "X_fp CDF at 70 m, mu=500/km2 with N in {1,5,10,20}, plus lambda=500/km2 with N=5",
         [] {
             auto c = base(ExperimentKind::FavorableCdf, "fig6");
             c.user_distance_m = {70.0};
             for (const char *n : {"1", "5", "10", "20"})
                 c.explicit_sets.push_back({{"n_per_ap", n}, {"antenna_density_per_km2", "500"}});
             c.explicit_sets.push_back({{"n_per_ap", "5"}, {"lambda_per_km2", "500"}});
             return c;
         }},
        {"fig7", "shadowed X_fp CDF at 70 m, sigma in {0,5,10} dB, lambda=100/km2, alpha=3.76, N=1",
         [] {
             auto c = base(ExperimentKind::FavorableCdf, "fig7");
             c.lambda_per_km2 = {100.0};
             c.shadow_sigma_db = {0.0, 5.0, 10.0};
             c.user_distance_m = {70.0};
             return c;
         }},
        {"fig8", "X_fp CDF at 70 m, alpha in {4,3,2}, N=1; lambda_per_km2 must be supplied",
         [] {
             auto c = base(ExperimentKind::FavorableCdf, "fig8");
             c.alpha = {4.0, 3.0, 2.0};
             c.user_distance_m = {70.0};
             c.required_overrides = {"lambda_per_km2"};
             return c;
         }},
        {"fig9", "uplink rates, M=100 with N=1 (L=100), K=20, tau_p=20, tau_c=500, 1 km2 square, three-slope",
         [] { return table_rates(ExperimentKind::RatesUplink, "fig9", 1); }},
        {"fig10", "downlink rates, M=100 with N=1 (L=100), K=20, tau_p=20, tau_c=500, 1 km2 square, three-slope",
         [] { return table_rates(ExperimentKind::RatesDownlink, "fig10", 1); }},
        {"fig11", "uplink rates, M=100 with N=5 (L=20), K=20, tau_p=20, tau_c=500, 1 km2 square, three-slope",
         [] { return table_rates(ExperimentKind::RatesUplink, "fig11", 5); }},
        {"three-slope", "X_ch CDF under the three-slope law (d0=10, d1=50), mu in {500,1000,2000}/km2, N in {1,10}",
         [] {
             auto c = base(ExperimentKind::HardeningCdf, "three-slope");
             c.pathloss = "three";
             c.c_db = 0.0;
             c.n_per_ap = {1, 10};
             c.antenna_density_per_km2 = {500.0, 1000.0, 2000.0};
             return c;
         }},
        {"fp-distance", "X_fp CDF, lambda in {50,100,200}/km2, distance in {70,212} m, alpha=3.76, N=1",
         [] {
             auto c = base(ExperimentKind::FavorableCdf, "fp-distance");
             c.lambda_per_km2 = {50.0, 100.0, 200.0};
             c.user_distance_m = {70.0, 212.0};
             return c;
         }},
        {"moments", "shot-noise moments vs closed form, mu=1000/km2, N in {1,10}, alpha=3.76, disk 500 m",
         [] {
             auto c = base(ExperimentKind::MomentsCheck, "moments");
             c.n_per_ap = {1, 10};
             c.antenna_density_per_km2 = {1000.0};
             c.trials = 100000;
             return c;
         }},
    };
    return entries;
}

const PresetEntry &find_preset(const std::string &id)
{
    for (const auto &e : registry())
        if (e.id == id)
            return e;
    std::string known;
    for (const auto &e : registry())
        known += (known.empty() ? "" : ", ") + e.id;
    throw ConfigError("Unknown figure id '" + id + "' (known: " + known + ").");
}

} // namespace

std::vector<std::string> preset_ids()
{
    std::vector<std::string> ids;
    for (const auto &e : registry())
        ids.push_back(e.id);
    return ids;
}

ExperimentConfig preset(const std::string &figure_id)
{
    return find_preset(figure_id).make();
}

std::string preset_summary(const std::string &figure_id)
{
    return find_preset(figure_id).summary;
}

} // namespace cfmimo
