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

#include "cfmimo/validation.hpp"

#include "cfmimo/analytics.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/harness.hpp"
#include "cfmimo/metrics.hpp"
#include "cfmimo/rates.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace cfmimo
{

namespace
{

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

bool near(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

} // namespace

std::vector<CheckResult> run_validation(bool quick, std::uint64_t seed, unsigned workers)
{
    std::vector<CheckResult> out;
    auto check = [&](const std::string &name, const std::function<CheckResult()> &body) {
        try
        {
            auto r = body();
            r.name = name;
            out.push_back(std::move(r));
        }
        catch (const std::exception &e)
        {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };

    check("single-slope pathloss", [] {
        const auto m = PropagationModel::single_slope(4.0);
        const bool ok = m.gain(0.5) == 1.0 && near(m.gain(10.0), 1e-4, 1e-12) && m.gain(0.0) == 1.0;
        return CheckResult{"", ok, "l(0.5)=" + fmt(m.gain(0.5)) + " l(10)=" + fmt(m.gain(10.0))};
    });

    check("three-slope pathloss", [] {
        const auto m = PropagationModel::three_slope(10.0, 50.0, 0.0);
        const double expect = 1e-2 * std::pow(50.0, -1.5);
        const bool cont = near(m.gain(50.0), std::pow(50.0, -3.5), 1e-12) &&
                          near(m.gain(10.0), std::pow(10.0, -2.0) * std::pow(50.0, -1.5), 1e-12);
        return CheckResult{"", near(m.gain(5.0), expect, 1e-12) && cont, "l(5)=" + fmt(m.gain(5.0))};
    });

    check("link-budget constant", [] {
        const double f = std::log10(1900.0);
        const double expect = 105.0 + 94.0 - 46.3 - 33.9 * f + 13.82 * std::log10(15.0) +
                              (1.1 * f - 0.7) * 1.65 - (1.56 * f - 0.8);
        const double c = constant_c_db(1900.0, 15.0, 1.65);
        return CheckResult{"", near(c, expect, 1e-12), "C=" + fmt(c) + " dB"};
    });

    check("hypoexponential closed form", [] {
        const double rates[] = {1.0, 2.0};
        const double v = hypoexp_cdf(rates, 1.0);
        const double expect = 1.0 - 2.0 * std::exp(-1.0) + std::exp(-2.0);
        return CheckResult{"", near(v, expect, 1e-12), "F(1)=" + fmt(v)};
    });

    check("hypoexponential vs Monte Carlo", [&] {
        const std::vector<double> beta{1.0, 0.5, 0.3, 0.2, 0.1};
        std::vector<double> rates;
        for (double b : beta)
            rates.push_back(1.0 / b);
        LargeScaleProfile p;
        p.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), 5);
        Rng rng = Rng::derive(seed, {1});
        const std::size_t n = quick ? 20000 : 100000;
        std::vector<double> s(n);
        for (auto &v : s)
            v = channel_gain(p, draw_gamma_sums(5, 1, rng), 0);
        const double ks = ks_distance(EmpiricalCdf(s), [&](double x) { return hypoexp_cdf(rates, x); });
        const double tol = quick ? 0.02 : 0.01;
        return CheckResult{"", ks < tol, "KS=" + fmt(ks)};
    });

    check("channel hardening metric", [] {
        const double b[] = {1.0, 0.5};
        const double v = x_ch(b, 1);
        return CheckResult{"", near(v, 1.25 / 2.25, 1e-12), "X_ch=" + fmt(v)};
    });

    check("favorable-propagation bound", [&] {
        Rng rng = Rng::derive(seed, {2});
        bool ok = true;
        for (int t = 0; t < 200; ++t)
        {
            const unsigned n = 1 + static_cast<unsigned>(t % 7);
            const auto real = sample_ppp(Region::disk(500.0), 1e-4, n, rng);
            if (real.empty())
                continue;
            const auto prof = large_scale_profile(real, {{0, 0}, {70, 0}}, PropagationModel::single_slope(3.76), rng);
            const auto vb = var_bound_check(prof, 0, 1);
            ok &= x_fp(prof, 0, 1) <= 1.0 / n * (1 + 1e-12) && vb.holds && x_ch(prof, 0) <= 1.0 / n * (1 + 1e-12);
        }
        return CheckResult{"", ok, "X_fp, X_ch <= 1/N over 200 realizations"};
    });

    check("hardening ratio limit", [] {
        const auto h = hardening_ratio(1e-3, 1, 3.76, 1e5);
        return CheckResult{"", std::abs(h.exact - h.asymptotic) < 1e-3,
                           "exact=" + fmt(h.exact) + " limit=" + fmt(h.asymptotic)};
    });

    check("free-space branch continuity", [] {
        const auto a = lemma1_moments(1e-3, 1, 2.0, 500.0);
        const auto b = lemma1_moments(1e-3, 1, 2.0 + 1e-5, 500.0);
        return CheckResult{"", near(a.mean, b.mean, 1e-4), "mean=" + fmt(a.mean)};
    });

    check("shot-noise moments vs closed form", [&] {
        const std::size_t trials = quick ? 20000 : 100000;
        const auto e = estimate_shot_noise(1e-3, 1, 3.76, 500.0, trials, 5.0, 1000, seed, workers, 3);
        const auto g = lemma1_moments(1e-3, 1, 3.76, 500.0);
        const double tol_m = quick ? 0.02 : 0.01, tol_v = quick ? 0.05 : 0.03;
        const bool ok = near(e.mean_g2.value, g.mean, tol_m) && near(e.var_g2.value, g.variance, tol_v);
        return CheckResult{"", ok,
                           "mean " + fmt(e.mean_g2.value) + " vs " + fmt(g.mean) + ", var " + fmt(e.var_g2.value) +
                               " vs " + fmt(g.variance)};
    });

    check("power allocation sums to q", [&] {
        Rng rng = Rng::derive(seed, {4});
        Eigen::MatrixXd gamma(10, 3);
        for (Eigen::Index i = 0; i < gamma.size(); ++i)
            gamma.data()[i] = rng.uniform(0.01, 1.0);
        const auto p = dl_power_alloc(gamma, 100.0);
        const Eigen::VectorXd sums = p.colwise().sum();
        return CheckResult{"", (sums.array() - 100.0).abs().maxCoeff() < 1e-10, "column sums=" + fmt(sums(0))};
    });

    check("MMSE estimate power", [&] {
        Rng rng = Rng::derive(seed, {5});
        LargeScaleProfile p;
        p.beta = Eigen::MatrixXd::Constant(1, 20, 0.05);
        RateScenario sc;
        const RateSimulator sim(p, sc);
        const std::size_t n = quick ? 2000 : 20000;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += sim.draw(rng).g_hat.cwiseAbs2().mean();
        const double est = acc / static_cast<double>(n);
        const double gamma = sim.gamma()(0, 0);
        return CheckResult{"", near(est, gamma, quick ? 0.03 : 0.01), "E|g_hat|^2=" + fmt(est) + " gamma=" + fmt(gamma)};
    });

    check("worker-count determinism", [&] {
        auto cfg = preset("fig5");
        cfg.trials = quick ? 200 : 1000;
        cfg.seed = seed;
        cfg.workers = 1;
        const auto a = run(cfg).to_csv();
        cfg.workers = std::max(2u, workers);
        const auto b = run(cfg).to_csv();
        return CheckResult{"", a == b, a == b ? "identical CSV" : "CSV differs"};
    });

    return out;
}

} // namespace cfmimo
