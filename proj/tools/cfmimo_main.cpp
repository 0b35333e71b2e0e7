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

// Command-line front end. Data goes to CSV files, summaries to stdout and
// diagnostics to stderr. Exit codes: 0 success, 1 failure, 2 bad arguments.

#include "cfmimo/harness.hpp"
#include "cfmimo/validation.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadArgs = 2;

struct Common
{
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    unsigned workers = 1;
    std::vector<std::string> overrides; // key=value
};

void add_common(CLI::App *cmd, Common &c)
{
    cmd->add_option("--seed", c.seed, "Master seed");
    cmd->add_option("--trials", c.trials, "Number of trials (realizations)");
    cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--set", c.overrides, "Override a config key, e.g. --set lambda_per_km2=100")
        ->take_all();
}

void apply(cfmimo::ExperimentConfig &cfg, const Common &c)
{
    for (const auto &kv : c.overrides)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw cfmimo::ConfigError("--set expects key=value, got '" + kv + "'.");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed)
        cfg.seed = *c.seed;
    if (c.trials)
        cfg.trials = *c.trials;
    cfg.workers = c.workers;
}

void run_and_write(const cfmimo::ExperimentConfig &cfg, const std::filesystem::path &out)
{
    const auto table = cfmimo::run(cfg);
    table.write_csv(out);
    std::cout << cfg.name << ": " << table.rows.size() << " rows -> " << out.string() << " ("
              << table.wall_time_s << " s)\n";
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"cfmimo: stochastic-geometry simulator for cell-free Massive MIMO"};
    app.require_subcommand(1);

    Common common;

    auto *reproduce = app.add_subcommand("reproduce", "Run a figure preset and write <out>/<figure>.csv");
    std::string figure;
    std::string out_dir = ".";
    reproduce->add_option("figure", figure, "Figure id (see `presets`)")->required();
    reproduce->add_option("--out", out_dir, "Output directory");
    add_common(reproduce, common);

    auto *runcmd = app.add_subcommand("run", "Run an experiment from a config file");
    std::string config_path;
    std::string out_file;
    runcmd->add_option("--config", config_path, "Flat key = value config file")->required();
    runcmd->add_option("--out", out_file, "Output CSV path (default: <name>.csv)");
    add_common(runcmd, common);

    auto *validate = app.add_subcommand("validate", "Run the oracle and property checks");
    bool quick = false;
    std::uint64_t vseed = 1;
    unsigned vworkers = 1;
    validate->add_flag("--quick", quick, "Reduced Monte-Carlo sizes");
    validate->add_option("--seed", vseed, "Master seed");
    validate->add_option("--workers", vworkers, "Worker threads")->check(CLI::PositiveNumber);

    auto *presets = app.add_subcommand("presets", "List figure presets");
    bool show_config = false;
    presets->add_flag("--config", show_config, "Print each preset's full config text");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return kBadArgs;
    }

    try
    {
        if (*reproduce)
        {
            auto cfg = cfmimo::preset(figure);
            apply(cfg, common);
            run_and_write(cfg, std::filesystem::path(out_dir) / (figure + ".csv"));
        }
        else if (*runcmd)
        {
            auto cfg = cfmimo::load_config(config_path);
            apply(cfg, common);
            run_and_write(cfg, out_file.empty() ? std::filesystem::path(cfg.name + ".csv") : std::filesystem::path(out_file));
        }
        else if (*validate)
        {
            bool all = true;
            for (const auto &r : cfmimo::run_validation(quick, vseed, vworkers))
            {
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " - " << r.detail << "\n";
                all &= r.passed;
            }
            return all ? kOk : kFailed;
        }
        else if (*presets)
        {
            for (const auto &id : cfmimo::preset_ids())
            {
                std::cout << id << ": " << cfmimo::preset_summary(id) << "\n";
                if (show_config)
                    std::cout << cfmimo::preset(id).to_text() << "\n";
            }
        }
    }
    catch (const cfmimo::ConfigError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kBadArgs;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kOk;
}
