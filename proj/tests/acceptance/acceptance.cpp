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


// Acceptance suite: one PASS/FAIL line per criterion, full Monte-Carlo sizes.
// Exit status is nonzero when any criterion fails.
//
//   acceptance [--workers N] [--only K]

#include "cfmimo/analytics.hpp"
#include "cfmimo/harness.hpp"
#include "cfmimo/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace cfmimo;

namespace
{

unsigned g_workers = std::max(1u, std::thread::hardware_concurrency());

struct Outcome
{
    bool passed = false;
    std::string detail;
};

std::string fmt(double v, int prec = 4)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Empirical CDF value and its binomial standard error
struct Prob
{
    double p = 0.0;
    double se = 0.0;
};

Prob prob_at(const std::vector<double> &samples, double x)
{
    const EmpiricalCdf cdf(samples);
    const double p = cdf.query(x);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples.size()))};
}

// b exceeds a by more than one standard error of the difference
bool increases(const Prob &a, const Prob &b) { return b.p - a.p > std::hypot(a.se, b.se); }

std::size_t find_set(const SampleRun &run, const std::function<bool(const ParamSet &)> &pred)
{
    for (std::size_t i = 0; i < run.sets.size(); ++i)
        if (pred(run.sets[i]))
            return i;
    throw std::runtime_error("parameter set not found");
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

SampleRun samples_of(ExperimentConfig cfg)
{
    cfg.workers = g_workers;
    return run_samples(cfg);
}

// ---- criteria ----------------------------------------------------------

Outcome shot_noise_moments()
{
    const double lambda = 1e-3, alpha = 3.76, rho = 500.0;
    const std::size_t trials = 100000;
    const auto e1 = estimate_shot_noise(lambda, 1, alpha, rho, trials, 5.0, 1000, 11, g_workers, 0);
    const auto e10 = estimate_shot_noise(lambda / 10.0, 10, alpha, rho, trials, 5.0, 1000, 11, g_workers, 1);
    const auto g1 = lemma1_moments(lambda, 1, alpha, rho);

    const double m1 = rel_err(e1.mean_g2.value, g1.mean);
    const double v1 = rel_err(e1.var_g2.value, g1.variance);
    const double m10 = rel_err(e10.mean_g2.value, g1.mean);
    const double ratio = e10.var_g2.value / e1.var_g2.value;
    const double r = rel_err(ratio, 5.5);
    const bool ok = m1 < 0.01 && v1 < 0.03 && m10 < 0.01 && r < 0.05;
    return {ok, "N=1 mean err " + fmt(100 * m1, 3) + "%, var err " + fmt(100 * v1, 3) + "%; N=10 mean err " +
                    fmt(100 * m10, 3) + "%, variance ratio " + fmt(ratio) + " (target 5.5)"};
}

Outcome macro_diversity_gap()
{
    auto cfg = preset("fig2");
    cfg.seed = 21;
    const auto run = samples_of(cfg);
    const auto i1 = find_set(run, [](const ParamSet &p) { return p.n_per_ap == 1; });
    const auto i100 = find_set(run, [](const ParamSet &p) { return p.n_per_ap == 100; });
    const double q1 = EmpiricalCdf(run.samples[i1]).quantile(0.05);
    const double q100 = EmpiricalCdf(run.samples[i100]).quantile(0.05);
    const double gap = 10.0 * std::log10(q1 / q100);
    return {std::abs(gap - 12.0) <= 1.5, "5th-percentile gain gap N=1 vs N=100: " + fmt(gap) + " dB (target 12 +- 1.5)"};
}

Outcome hypoexponential_exactness()
{
    const std::vector<double> dist{20.0, 35.0, 60.0, 90.0, 150.0};
    const auto model = PropagationModel::single_slope(3.76);
    LargeScaleProfile prof;
    prof.beta.resize(static_cast<Eigen::Index>(dist.size()), 1);
    std::vector<double> rates;
    for (std::size_t m = 0; m < dist.size(); ++m)
    {
        prof.beta(static_cast<Eigen::Index>(m), 0) = model.gain(dist[m]);
        rates.push_back(1.0 / model.gain(dist[m]));
    }
    Rng rng = Rng::derive(31, {0});
    std::vector<double> s(100000);
    for (auto &v : s)
        v = channel_gain(prof, draw_gamma_sums(dist.size(), 1, rng), 0);
    const double ks = ks_distance(EmpiricalCdf(s), [&](double x) { return hypoexp_cdf(rates, x); });
    return {ks < 0.01, "KS distance " + fmt(ks) + " over 1e5 draws (limit 0.01)"};
}

Outcome hardening_regimes()
{
    auto cfg = preset("fig3");
    cfg.seed = 41;
    const auto run = samples_of(cfg);
    auto p = [&](double alpha, double lambda_km2) {
        const auto i = find_set(run, [&](const ParamSet &s) {
            return close(s.alpha, alpha) && close(s.lambda_per_m2, lambda_km2 * 1e-6);
        });
        return prob_at(run.samples[i], 0.05);
    };
    const Prob a2 = p(3.76, 1e2), a3 = p(3.76, 1e3), a5 = p(3.76, 1e5);
    const Prob f2 = p(2.0, 1e2), f3 = p(2.0, 1e3), f5 = p(2.0, 1e5);
    // "Markedly": a rise of at least 0.1, the same scale as the flatness bound
    const bool flat = std::abs(a3.p - a2.p) < 0.1;
    const bool rise = a5.p - a3.p >= 0.1;
    const bool free_space = increases(f2, f3) && increases(f3, f5);
    return {flat && rise && free_space, "alpha=3.76 p(0.05) " + fmt(a2.p) + " / " + fmt(a3.p) + " / " + fmt(a5.p) +
                                             " (flat " + (flat ? "yes" : "no") + ", marked rise " +
                                             (rise ? "yes" : "no") + "); alpha=2 " + fmt(f2.p) + " / " + fmt(f3.p) +
                                             " / " + fmt(f5.p) + (free_space ? " increasing" : " not increasing")};
}

Outcome n_monotonicity()
{
    auto cfg = preset("fig5");
    cfg.seed = 51;
    const auto run = samples_of(cfg);
    const auto grid = log_grid(1e-6, 1.0, cfg.grid_points);
    std::vector<EmpiricalCdf> cdfs;
    for (const auto &s : run.samples)
        cdfs.emplace_back(s);
    double worst = 0.0; // largest decrease in units of standard error
    std::size_t violations = 0;
    for (std::size_t i = 0; i + 1 < cdfs.size(); ++i)
        for (double x : grid)
        {
            const double a = cdfs[i].query(x), b = cdfs[i + 1].query(x);
            const double se = std::max({cdfs[i].standard_error(x), cdfs[i + 1].standard_error(x), 1e-12});
            if (a - b > se)
                ++violations;
            worst = std::max(worst, (a - b) / se);
        }
    return {violations == 0, std::to_string(violations) + " grid points decrease by more than one standard error; " +
                                 "worst decrease " + fmt(worst, 3) + " SE"};
}

Outcome asymptotic_ratios()
{
    const auto h = hardening_ratio(1e-3, 1, 3.76, 1e5);
    const auto t = three_slope_moments(1e-3, 1, 10.0, 50.0);
    const double dh = std::abs(h.exact - h.asymptotic);
    const double dt = rel_err(t.ratio_approx, t.ratio_exact);
    return {dh < 1e-3 && dt < 1e-3, "hardening ratio exact " + fmt(h.exact, 6) + " vs limit " + fmt(h.asymptotic, 6) +
                                        " (diff " + fmt(dh, 3) + "); three-slope exact " + fmt(t.ratio_exact, 6) +
                                        " vs approx " + fmt(t.ratio_approx, 6) + " (" + fmt(100 * dt, 3) +
                                        "%, limit 0.1%)"};
}

double max_pairwise_ks(const SampleRun &run)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < run.samples.size(); ++i)
        for (std::size_t j = i + 1; j < run.samples.size(); ++j)
            worst = std::max(worst, ks_distance(EmpiricalCdf(run.samples[i]), EmpiricalCdf(run.samples[j])));
    return worst;
}

Outcome shadowing_insensitivity()
{
    auto ch = preset("fig4");
    ch.seed = 71;
    auto fp = preset("fig7");
    fp.seed = 72;
    const double ks_ch = max_pairwise_ks(samples_of(ch));
    const double ks_fp = max_pairwise_ks(samples_of(fp));
    return {ks_ch < 0.03 && ks_fp < 0.03,
            "max pairwise KS over sigma in {0,5,10} dB: X'_ch " + fmt(ks_ch) + ", X'_fp " + fmt(ks_fp) + " (limit 0.03)"};
}

Outcome favorable_orderings()
{
    const double gamma = 1e-3;
    std::string detail;
    bool ok = true;
    std::size_t total = 0, above = 0;
    auto bound_check = [&](const SampleRun &run) {
        for (std::size_t s = 0; s < run.sets.size(); ++s)
            for (double v : run.samples[s])
            {
                ++total;
                above += v > (1.0 / run.sets[s].n_per_ap) * (1.0 + 1e-12) ? 1 : 0;
            }
    };

    auto dist = preset("fp-distance");
    dist.seed = 81;
    const auto rd = samples_of(dist);
    bound_check(rd);
    auto pd = [&](double lambda_km2, double l) {
        const auto i = find_set(rd, [&](const ParamSet &s) {
            return close(s.lambda_per_m2, lambda_km2 * 1e-6) && close(s.user_distance_m, l);
        });
        return prob_at(rd.samples[i], gamma);
    };
    for (double l : {70.0, 212.0})
    {
        const Prob a = pd(50, l), b = pd(100, l), c = pd(200, l);
        const bool inc = increases(a, b) && increases(b, c);
        ok &= inc;
        detail += "lambda 50/100/200 at " + fmt(l) + " m: " + fmt(a.p) + " / " + fmt(b.p) + " / " + fmt(c.p) +
                  (inc ? " ok" : " NOT increasing") + "; ";
    }
    for (double lam : {50.0, 100.0, 200.0})
    {
        const Prob a = pd(lam, 70), b = pd(lam, 212);
        const bool inc = increases(a, b);
        ok &= inc;
        detail += "70->212 m at lambda " + fmt(lam) + ": " + fmt(a.p) + " -> " + fmt(b.p) + (inc ? " ok" : " NOT increasing") +
                  "; ";
    }

    auto path = preset("fig8");
    path.set("lambda_per_km2", "100");
    path.seed = 82;
    const auto rp = samples_of(path);
    bound_check(rp);
    auto pa = [&](double alpha) {
        return prob_at(rp.samples[find_set(rp, [&](const ParamSet &s) { return close(s.alpha, alpha); })], gamma);
    };
    const Prob a4 = pa(4), a3 = pa(3), a2 = pa(2);
    const bool inc = increases(a4, a3) && increases(a3, a2);
    ok &= inc;
    detail += "alpha 4/3/2 at lambda 100: " + fmt(a4.p) + " / " + fmt(a3.p) + " / " + fmt(a2.p) +
              (inc ? " ok" : " NOT increasing") + "; ";

    auto dens = preset("fig6");
    dens.seed = 83;
    bound_check(samples_of(dens));
    ok &= above == 0;
    detail += "X_fp > 1/N in " + std::to_string(above) + " of " + std::to_string(total) + " samples";
    return {ok, detail};
}

struct RateMedians
{
    double ul_uatf, ul_general, ul_perfect, dl_uatf, dl_general, dl_perfect;
    std::size_t users = 0, uatf_below_general = 0;
};

RateMedians rate_medians(const RateRun &run)
{
    std::vector<double> uu, ug, up, du, dg, dp;
    RateMedians m{};
    for (const auto &r : run.realizations.at(0))
        for (std::size_t k = 0; k < r.ul_uatf.size(); ++k)
        {
            uu.push_back(r.ul_uatf[k]);
            ug.push_back(r.ul_general[k].value);
            up.push_back(r.ul_perfect[k].value);
            du.push_back(r.dl_uatf[k]);
            dg.push_back(r.dl_general[k].rate.value);
            dp.push_back(r.dl_perfect[k].value);
            ++m.users;
            m.uatf_below_general += r.ul_uatf[k] < r.ul_general[k].value ? 1 : 0;
        }
    m.ul_uatf = median(uu);
    m.ul_general = median(ug);
    m.ul_perfect = median(up);
    m.dl_uatf = median(du);
    m.dl_general = median(dg);
    m.dl_perfect = median(dp);
    return m;
}

Outcome rate_orderings()
{
    auto n1 = preset("fig9"); // uplink and downlink bounds come from the same runs
    n1.seed = 91;
    n1.workers = g_workers;
    auto n5 = preset("fig11");
    n5.seed = 92;
    n5.workers = g_workers;
    const auto a = rate_medians(run_rates(n1));
    const auto b = rate_medians(run_rates(n5));

    const double frac = static_cast<double>(a.uatf_below_general + b.uatf_below_general) /
                        static_cast<double>(a.users + b.users);
    const double ul_gap1 = rel_err(a.ul_general, a.ul_perfect), ul_gap5 = rel_err(b.ul_general, b.ul_perfect);
    const bool c1 = frac >= 0.99;
    const bool c2 = ul_gap1 <= 0.03 && ul_gap5 <= 0.03;
    const bool c3 = a.dl_uatf < a.dl_general && a.dl_general < a.dl_perfect;
    const double gap1 = a.ul_perfect - a.ul_uatf, gap5 = b.ul_perfect - b.ul_uatf;
    const bool c4 = gap5 < gap1 && a.ul_general > b.ul_general;
    return {c1 && c2 && c3 && c4,
            "UL UatF < general for " + fmt(100 * frac, 5) + "% of users; UL general vs perfect median " +
                fmt(100 * ul_gap1, 3) + "% (N=1), " + fmt(100 * ul_gap5, 3) + "% (N=5); DL medians UatF/general/perfect " +
                fmt(a.dl_uatf) + " / " + fmt(a.dl_general) + " / " + fmt(a.dl_perfect) + "; UL UatF-perfect gap N=1 " +
                fmt(gap1) + " vs N=5 " + fmt(gap5) + "; UL general median N=1 " + fmt(a.ul_general) + " vs N=5 " +
                fmt(b.ul_general)};
}

Outcome reproducibility()
{
    std::size_t differing = 0;
    std::string which;
    for (const auto &id : preset_ids())
    {
        auto cfg = preset(id);
        if (id == "fig8")
            cfg.set("lambda_per_km2", "100");
        const bool rates = cfg.kind == ExperimentKind::RatesUplink || cfg.kind == ExperimentKind::RatesDownlink;
        cfg.trials = rates ? 4 : 300;
        if (rates)
            cfg.scenario.fading_draws = 200;
        if (cfg.kind == ExperimentKind::MomentsCheck)
            cfg.inner_replicates = 50;
        cfg.seed = 101;
        cfg.workers = 1;
        const auto one = run(cfg).to_csv();
        cfg.workers = 8;
        const auto eight = run(cfg).to_csv();
        if (one != eight)
        {
            ++differing;
            which += " " + id;
        }
    }
    return {differing == 0, std::to_string(preset_ids().size()) + " presets, worker counts 1 and 8: " +
                                (differing ? "CSV differs for" + which : std::string("identical bytes"))};
}

} // namespace

int main(int argc, char **argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i)
    {
        if (!std::strcmp(argv[i], "--workers") && i + 1 < argc)
            g_workers = static_cast<unsigned>(std::max(1, std::atoi(argv[++i])));
        else if (!std::strcmp(argv[i], "--only") && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else
        {
            std::fprintf(stderr, "usage: acceptance [--workers N] [--only K]\n");
            return 2;
        }
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"shot-noise moments match closed form", shot_noise_moments},
        {"macro-diversity 5th-percentile gap", macro_diversity_gap},
        {"hypoexponential CDF exactness", hypoexponential_exactness},
        {"hardening regimes versus AP density", hardening_regimes},
        {"hardening monotone in antennas per AP", n_monotonicity},
        {"asymptotic hardening ratios", asymptotic_ratios},
        {"shadowing insensitivity", shadowing_insensitivity},
        {"favorable-propagation orderings", favorable_orderings},
        {"rate-bound orderings", rate_orderings},
        {"worker-count reproducibility", reproducibility},
    };

    int failed = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        if (only && static_cast<int>(i + 1) != only)
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s [%zu] %s - %s (%.1f s)\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.passed ? 0 : 1;
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d criteria failed; total %.1f s\n", failed, total);
    return failed ? 1 : 0;
}
