// SPDX-License-Identifier: Apache-2.0
//
// rdars-pwm: joint beamforming and mode switching for RDARS-aided MIMO downlinks
// Copyright (C) 2026 The rdars-pwm authors
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

#ifndef RDARS_SELFCHECK_HPP
#define RDARS_SELFCHECK_HPP

#include "rdars/solver.hpp"

#include <functional>
#include <sstream>

namespace rdars
{

struct CheckResult
{
    std::string name;
    std::string module;
    bool passed = false;
    std::string detail;
};

namespace detail
{

// Small random instance with generic (u, lambda) and a relaxed selection.
struct CheckInstance
{
    SystemConfig cfg;
    ChannelSet ch;
    SolverState st;
    rvec alpha;
};

inline CheckInstance random_instance(std::uint64_t idx, int N = 8, int a = 2)
{
    CheckInstance in;
    in.cfg.K = 2;
    in.cfg.Nt = 3;
    in.cfg.set_elements(N);
    in.cfg.a = a;
    in.ch = generate_channels(in.cfg, 0xC0FFEE, idx);
    // scale the paths to comparable size so every term of the objective matters
    in.ch.G /= in.ch.kappa_b;
    for (std::size_t k = 0; k < in.ch.h_r.size(); ++k)
        in.ch.h_r[k] /= in.ch.kappa_r[k];
    auto rng = make_rng(0xC0FFEE, idx, 0x5E1F);
    random_start(in.st, N, a, rng);
    std::uniform_real_distribution<double> u01(0.2, 1.5);
    const int n = in.cfg.Nt + a, K = in.cfg.K;
    in.st.F.resize(n, K);
    for (int c = 0; c < K; ++c)
        for (int r = 0; r < n; ++r)
            in.st.F(r, c) = complex_normal(rng);
    in.st.u.resize(K);
    in.st.lambda.resize(K);
    in.alpha.resize(K);
    for (int k = 0; k < K; ++k)
    {
        in.st.u[k] = complex_normal(rng);
        in.st.lambda[k] = u01(rng);
        in.alpha[k] = u01(rng);
    }
    in.st.a_vec = rvec::Zero(N);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < N; ++i)
        in.st.a_vec[i] = coin(rng) ? 1.0 : 0.0;
    in.cfg.sigma2_dbm = 30.0; // sigma2 = 1 W
    in.cfg.Ptot_dbm = 30.0;
    return in;
}

// sum alpha_k lambda_k e_k + ||A - Atilde Atilde^H||_F^2 / (2 rho), dense.
inline double direct_objective(const CheckInstance &in, const SolverState &st, double rho)
{
    const EffectiveChannel eff = effective_channel(in.ch, st);
    double f = 0.0;
    for (int k = 0; k < eff.K(); ++k)
        f += in.alpha[k] * st.lambda[k] *
             mse_e_k(eff.H.row(k), st.F, k, st.u[k], in.cfg.sigma2(), in.cfg.ptot());
    const int N = in.ch.N();
    rmat A = st.a_vec.asDiagonal();
    rmat At = rmat::Zero(N, st.connected());
    for (int l = 0; l < st.connected(); ++l)
        At(st.assign[static_cast<std::size_t>(l)], l) = 1.0;
    return f + (A - At * At.transpose()).squaredNorm() / (2.0 * rho);
}

inline std::vector<std::vector<int>> all_assignments(int N, int a)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void()> rec = [&] {
        if (static_cast<int>(cur.size()) == a)
        {
            out.push_back(cur);
            return;
        }
        for (int i = 0; i < N; ++i)
            if (std::find(cur.begin(), cur.end(), i) == cur.end())
            {
                cur.push_back(i);
                rec();
                cur.pop_back();
            }
    };
    rec();
    return out;
}

inline CheckResult make_check(const std::string &name, const std::string &module, bool ok, double worst,
                              const std::string &what)
{
    std::ostringstream os;
    os << what << " = " << worst;
    return {name, module, ok, os.str()};
}

} // namespace detail

/// Invariant suite at small sizes.
inline std::vector<CheckResult> run_selfcheck()
{
    using namespace detail;
    std::vector<CheckResult> out;

    {
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 50; ++s)
        {
            auto in = random_instance(s);
            in.st.a_vec = assignment_indicator(in.st.assign, in.ch.N());
            const EffectiveChannel eff = effective_channel(in.ch, in.st);
            worst = std::max(worst, rate_mmse_identity_gap(eff, in.st.F, in.cfg.sigma2(), in.cfg.ptot(), in.alpha));
        }
        out.push_back(make_check("rate_mmse_identity", "core-model", worst < 1e-9, worst, "max abs gap"));
    }
    {
        int violations = 0;
        bool bound = true;
        for (std::uint64_t s = 0; s < 20; ++s)
        {
            auto in = random_instance(s);
            const auto r = passive_update(in.ch, in.st, in.alpha, PassiveMode::iterate_to_tol, 100, 1e-12);
            violations += r.monotone_violations;
            bound = bound && r.bound_respected;
        }
        out.push_back(make_check("power_iteration_monotone", "passive-pi", violations == 0 && bound,
                                 violations, "decreasing steps"));
    }
    {
        double worst3 = 0.0, worst4 = 0.0, tight = 0.0;
        for (std::uint64_t s = 0; s < 5; ++s)
        {
            auto in = random_instance(s);
            in.st.a_prev = in.st.a_vec;
            const double rho = 0.7;
            const auto ss = build_selection_surrogate(in.ch, in.st, in.alpha, rho);
            const double f0 = ss.f3(ss.a_t), g0 = ss.f3_bar(ss.a_t);
            tight = std::max(tight, std::abs(f0 - g0));
            const int N = in.ch.N();
            for (int mask = 0; mask < (1 << N); ++mask)
            {
                rvec a(N);
                for (int i = 0; i < N; ++i)
                    a[i] = (mask >> i) & 1;
                worst3 = std::max(worst3, (ss.f3(a) - f0) - (ss.f3_bar(a) - g0));
            }
            in.st.atilde_prev = in.st.assign;
            const auto as = build_assignment_surrogate(in.ch, in.st, in.alpha, rho);
            const double h0 = as.f4(in.st.assign), k0 = as.f4_bar(in.st.assign);
            tight = std::max(tight, std::abs(h0 - k0));
            for (const auto &cand : all_assignments(N, in.st.connected()))
                worst4 = std::max(worst4, (as.f4(cand) - h0) - (as.f4_bar(cand) - k0));
        }
        const bool ok = worst3 <= 1e-9 && worst4 <= 1e-9 && tight <= 1e-9;
        out.push_back(make_check("mm_majorization", "mode-switch", ok, std::max({worst3, worst4, tight}),
                                 "max excess of true over surrogate"));
    }
    {
        double worst3 = 0.0, worst4 = 0.0;
        for (std::uint64_t s = 0; s < 5; ++s)
        {
            auto in = random_instance(s);
            const double rho = 0.3;
            in.st.a_prev = in.st.a_vec;
            const auto ss = build_selection_surrogate(in.ch, in.st, in.alpha, rho);
            const double base_f = ss.f3(in.st.a_vec), base_d = direct_objective(in, in.st, rho);
            auto rng = make_rng(s, 0, 0xA11C);
            std::bernoulli_distribution coin(0.5);
            for (int t = 0; t < 10; ++t)
            {
                SolverState st = in.st;
                for (int i = 0; i < in.ch.N(); ++i)
                    st.a_vec[i] = coin(rng) ? 1.0 : 0.0;
                const double lhs = ss.f3(st.a_vec) - base_f;
                const double rhs = direct_objective(in, st, rho) - base_d;
                worst3 = std::max(worst3, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
            }
            in.st.atilde_prev = in.st.assign;
            const auto as = build_assignment_surrogate(in.ch, in.st, in.alpha, rho);
            const double base4 = as.f4(in.st.assign);
            const auto cands = all_assignments(in.ch.N(), in.st.connected());
            for (int t = 0; t < 10; ++t)
            {
                SolverState st = in.st;
                st.assign = cands[static_cast<std::size_t>(rng() % cands.size())];
                const double lhs = as.f4(st.assign) - base4;
                const double rhs = direct_objective(in, st, rho) - base_d;
                worst4 = std::max(worst4, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
            }
        }
        out.push_back(make_check("selection_surrogate_matches_objective", "mode-switch", worst3 < 1e-8, worst3,
                                 "max relative difference mismatch"));
        out.push_back(make_check("assignment_surrogate_matches_objective", "mode-switch", worst4 < 1e-8, worst4,
                                 "max relative difference mismatch"));
    }
    {
        SystemConfig cfg;
        cfg.set_elements(16);
        cfg.Nt = 4;
        cfg.a = 2;
        double worst = 0.0;
        bool ok = true;
        for (std::uint64_t s = 0; s < 3; ++s)
        {
            const auto ch = generate_channels(cfg, 11, s);
            SolveOptions o;
            o.stream = s;
            o.fixed_rho_mode = true;
            const auto [st, tr] = pwm_solve(cfg, ch, o);
            for (std::size_t i = 1; i < tr.records.size(); ++i)
                worst = std::max(worst, tr.records[i].penalized_obj - tr.records[i - 1].penalized_obj);
            ok = ok && (st.phi.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12;
            ok = ok && std::abs(st.F.squaredNorm() - cfg.ptot()) < 1e-9 * cfg.ptot();
            ok = ok && std::abs(st.a_vec.sum() - cfg.a) == 0.0;
            ok = ok && penalty_residual(st.a_vec, st.assign) == 0.0;
            std::vector<int> sorted = st.assign;
            std::sort(sorted.begin(), sorted.end());
            ok = ok && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
            const EffectiveChannel eff = effective_channel(ch, st);
            const double w = wsr(cfg.weights(), normalized_rates(eff, st.F, cfg.sigma2(), cfg.ptot()));
            ok = ok && std::abs(w - tr.final_wsr()) <= 1e-10 * std::max(1.0, w);
        }
        out.push_back(make_check("final_state_constraints", "pwm-solver", ok, 0.0, "violations"));
        out.push_back(make_check("block_descent_fixed_rho", "pwm-solver", worst <= 1e-8, worst,
                                 "max objective increase"));
    }
    return out;
}

} // namespace rdars

#endif
