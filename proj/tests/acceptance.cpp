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

// Acceptance run: one PASS/FAIL line per criterion, followed by the measured
// numbers behind it. Exit status is nonzero when any criterion fails.

#include "rdars/experiment.hpp"
#include "rdars/selfcheck.hpp"
#include "rdars/train.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

using namespace rdars;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int prec = 6)
{
    std::ostringstream os;
    os.precision(prec);
    os << x;
    return os.str();
}

// 1. rate / MMSE identity on random states
Outcome rate_identity()
{
    const auto t0 = std::chrono::steady_clock::now();
    auto rng = make_rng(101);
    std::uniform_int_distribution<int> dk(1, 4), dnt(1, 16), dn(2, 32);
    std::uniform_real_distribution<double> w(0.1, 2.0), pw(0.0, 40.0);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s)
    {
        SystemConfig cfg;
        cfg.K = dk(rng);
        cfg.Nt = dnt(rng);
        cfg.set_elements(dn(rng));
        cfg.a = std::uniform_int_distribution<int>(1, cfg.N - 1)(rng);
        cfg.Ptot_dbm = pw(rng);
        const ChannelSet ch = generate_channels(cfg, 101, static_cast<std::uint64_t>(s));
        SolverState st;
        detail::random_start(st, cfg.N, cfg.a, rng);
        st.F.resize(cfg.Nt + cfg.a, cfg.K);
        for (Eigen::Index c = 0; c < st.F.cols(); ++c)
            for (Eigen::Index r = 0; r < st.F.rows(); ++r)
                st.F(r, c) = complex_normal(rng);
        st.F = scale_to_power(st.F, cfg.ptot());
        rvec alpha(cfg.K);
        for (int k = 0; k < cfg.K; ++k)
            alpha[k] = w(rng);
        worst = std::max(worst, rate_mmse_identity_gap(effective_channel(ch, st), st.F, cfg.sigma2(), cfg.ptot(), alpha));
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-9 && secs < 10.0,
            "max |identity gap| = " + fmt(worst) + " (tol 1e-9) over 1000 states, " + fmt(secs, 3) + " s (limit 10 s)"};
}

// 2. phase power iteration ascent and bound
Outcome phase_ascent()
{
    const SystemConfig cfg;
    int violations = 0, bound_breaks = 0;
    long steps = 0;
    for (int s = 0; s < 100; ++s)
    {
        const ChannelSet ch = generate_channels(cfg, 202, static_cast<std::uint64_t>(s));
        SolverState st;
        auto rng = make_rng(202, static_cast<std::uint64_t>(s), detail::init_purpose);
        detail::random_start(st, cfg.N, cfg.a, rng);
        detail::active_start(cfg, ch, st, cfg.weights(), {});
        detail::refresh_u_lambda(ch, st, cfg.sigma2(), cfg.ptot(), {});
        const PassiveResult r =
            passive_update(ch, st, cfg.weights(), PassiveMode::iterate_to_tol, cfg.max_inner_pi, cfg.tol_inner);
        violations += r.monotone_violations;
        bound_breaks += !r.bound_respected;
        steps += r.steps;
    }
    return {violations == 0 && bound_breaks == 0,
            std::to_string(violations) + " decreasing steps (tol 1e-10), " + std::to_string(bound_breaks) +
                " bound violations over 100 solves, " + std::to_string(steps) + " steps"};
}

// 3. block descent with the penalty held fixed
Outcome block_descent()
{
    const SystemConfig cfg;
    int bad_runs = 0;
    double worst = 0.0;
    for (int s = 0; s < 50; ++s)
    {
        const ChannelSet ch = generate_channels(cfg, 303, static_cast<std::uint64_t>(s));
        SolveOptions o;
        o.fixed_rho_mode = true;
        o.stream = static_cast<std::uint64_t>(s);
        const auto trace = pwm_solve(cfg, ch, o).second;
        bool ok = true;
        for (std::size_t i = 1; i < trace.records.size(); ++i)
        {
            const double prev = trace.records[i - 1].penalized_obj, cur = trace.records[i].penalized_obj;
            const double rise = (cur - prev) / std::max(1.0, std::abs(prev));
            worst = std::max(worst, rise);
            ok = ok && rise <= 1e-8;
        }
        bad_runs += !ok;
    }
    return {bad_runs == 0, std::to_string(bad_runs) + " of 50 runs with an increase; largest relative rise " +
                               fmt(worst) + " (tol 1e-8)"};
}

// 4. majorisation on exhaustive enumerations
Outcome majorization()
{
    double worst_gap = 0.0, worst_tight = 0.0;
    int cases = 0;
    std::uint64_t idx = 4000;
    for (int N = 4; N <= 10; ++N)
        for (int a = 1; a <= 3; ++a)
        {
            const auto in = detail::random_instance(idx++, N, a);
            const double rho = 0.7;
            SolverState st = in.st;
            st.a_prev = st.a_vec;
            st.atilde_prev = st.assign;
            const SelectionSurrogate s3 = build_selection_surrogate(in.ch, st, in.alpha, rho);
            const double f0 = s3.f3(s3.a_t), g0 = s3.f3_bar(s3.a_t);
            worst_tight = std::max(worst_tight, std::abs(f0 - g0) / std::max(1.0, std::abs(f0)));
            for (int mask = 0; mask < (1 << N); ++mask)
            {
                rvec x(N);
                for (int i = 0; i < N; ++i)
                    x[i] = (mask >> i) & 1;
                worst_gap = std::max(worst_gap, s3.f3(x) - s3.f3_bar(x));
                ++cases;
            }
            const AssignmentSurrogate s4 = build_assignment_surrogate(in.ch, st, in.alpha, rho);
            const double h0 = s4.f4(s4.atilde_t), k0 = s4.f4_bar(s4.atilde_t);
            worst_tight = std::max(worst_tight, std::abs(h0 - k0) / std::max(1.0, std::abs(h0)));
            for (const auto &c : detail::all_assignments(N, a))
            {
                worst_gap = std::max(worst_gap, s4.f4(c) - s4.f4_bar(c));
                ++cases;
            }
        }
    return {worst_gap <= 1e-9 && worst_tight <= 1e-9,
            "max (true - surrogate) = " + fmt(worst_gap) + ", max tightness error = " + fmt(worst_tight) +
                " (tol 1e-9) over " + std::to_string(cases) + " points"};
}

// 5. surrogate evaluations against the dense penalised objective
Outcome oracles()
{
    double worst3 = 0.0, worst4 = 0.0;
    const double rho = 0.9;
    for (int p = 0; p < 50; ++p)
    {
        const auto in = detail::random_instance(5000 + static_cast<std::uint64_t>(p), 8, 3);
        SolverState st = in.st;
        st.a_prev = st.a_vec;
        st.atilde_prev = st.assign;
        const SelectionSurrogate s3 = build_selection_surrogate(in.ch, st, in.alpha, rho);
        const AssignmentSurrogate s4 = build_assignment_surrogate(in.ch, st, in.alpha, rho);
        const double d0 = detail::direct_objective(in, st, rho);
        auto rng = make_rng(5000, static_cast<std::uint64_t>(p));
        SolverState alt = st;
        std::bernoulli_distribution coin(0.5);
        for (int i = 0; i < 8; ++i)
            alt.a_vec[i] = coin(rng) ? 1.0 : 0.0;
        const double lhs3 = s3.f3(alt.a_vec) - s3.f3(st.a_vec);
        const double rhs3 = detail::direct_objective(in, alt, rho) - d0;
        worst3 = std::max(worst3, std::abs(lhs3 - rhs3) / std::max(1.0, std::abs(rhs3)));

        SolverState alt4 = st;
        detail::random_start(alt4, 8, 3, rng);
        alt4.a_vec = st.a_vec;
        alt4.phi = st.phi;
        const double lhs4 = s4.f4(alt4.assign) - s4.f4(st.assign);
        const double rhs4 = detail::direct_objective(in, alt4, rho) - d0;
        worst4 = std::max(worst4, std::abs(lhs4 - rhs4) / std::max(1.0, std::abs(rhs4)));
    }
    return {worst3 <= 1e-8 && worst4 <= 1e-8, "selection max error " + fmt(worst3) + ", assignment max error " +
                                                  fmt(worst4) + " (tol 1e-8, 50 points each)"};
}

// 6. selection exactness and assignment heuristic gap
Outcome selection()
{
    auto rng = make_rng(606);
    int mismatches = 0, sel_cases = 0;
    for (int N = 2; N <= 10; ++N)
        for (int a = 1; a <= std::min(3, N - 1); ++a)
            for (int t = 0; t < 20; ++t)
            {
                cvec r6(N);
                for (int i = 0; i < N; ++i)
                    r6[i] = complex_normal(rng);
                const double got = r6.real().dot(select_a(r6, a));
                double best = std::numeric_limits<double>::infinity();
                for (int mask = 0; mask < (1 << N); ++mask)
                {
                    if (__builtin_popcount(static_cast<unsigned>(mask)) != a)
                        continue;
                    double v = 0.0;
                    for (int i = 0; i < N; ++i)
                        if ((mask >> i) & 1)
                            v += r6[i].real();
                    best = std::min(best, v);
                }
                mismatches += std::abs(got - best) > 1e-12;
                ++sel_cases;
            }

    std::vector<double> gaps;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t)
    {
        const int a = 1 + t % 3, N = a + 1 + (t / 3) % (10 - a);
        rvec c(N * a);
        for (int i = 0; i < N * a; ++i)
            c[i] = u(rng);
        auto cost = [&](const std::vector<int> &as) {
            double s = 0.0;
            for (std::size_t l = 0; l < as.size(); ++l)
                s += c[static_cast<Eigen::Index>(l) * N + as[l]];
            return s;
        };
        double best = std::numeric_limits<double>::infinity();
        for (const auto &cand : detail::all_assignments(N, a))
            best = std::min(best, cost(cand));
        gaps.push_back((cost(select_assignment(c, N, a)) - best) / best);
    }
    std::sort(gaps.begin(), gaps.end());
    const double exact = static_cast<double>(std::count_if(gaps.begin(), gaps.end(), [](double g) { return g <= 1e-12; })) / 500.0;
    const bool ok = mismatches == 0 && gaps.back() <= 0.05;
    return {ok, "select_a mismatches " + std::to_string(mismatches) + "/" + std::to_string(sel_cases) +
                    "; assignment gap: exact " + fmt(exact * 100, 4) + "%, median " + fmt(gaps[250]) + ", p95 " +
                    fmt(gaps[475]) + ", max " + fmt(gaps.back()) + " (limit 0.05)"};
}

// 7. architecture ordering
Outcome ordering()
{
    const SystemConfig cfg;
    const int R = 50;
    std::vector<double> pwm(R), fixed(R), das(R), ris(R);
    int moved = 0;
    const auto res = parallel_map<std::array<double, 5>>(static_cast<std::size_t>(R), [&](std::size_t r) {
        const ChannelSet ch = generate_channels(cfg, 707, r);
        SolveOptions o;
        o.stream = r;
        const auto [st, tr] = pwm_solve(cfg, ch, o);
        SolverState start;
        auto rng = make_rng(cfg.seed, r, detail::init_purpose);
        detail::random_start(start, cfg.N, cfg.a, rng);
        std::array<double, 5> out{};
        out[0] = tr.final_wsr();
        out[1] = fixed_index_solve(cfg, ch, o).second.final_wsr();
        out[2] = das_solve(cfg, ch, o, &st.assign).second.final_wsr();
        out[3] = ris_solve(cfg, ch, o).second.final_wsr();
        out[4] = start.assign == st.assign ? 0.0 : 1.0;
        return out;
    });
    for (int r = 0; r < R; ++r)
    {
        pwm[r] = res[r][0];
        fixed[r] = res[r][1];
        das[r] = res[r][2];
        ris[r] = res[r][3];
        moved += res[r][4] > 0.0;
    }
    auto margin = [&](const std::vector<double> &b) {
        std::vector<double> d(R);
        for (int r = 0; r < R; ++r)
            d[r] = pwm[r] - b[r];
        return std::make_pair(mean_of(d), stderr_of(d));
    };
    const auto mf = margin(fixed), md = margin(das), mr = margin(ris);
    std::ostringstream os;
    os.precision(5);
    os << "means pwm " << mean_of(pwm) << ", fixed_index " << mean_of(fixed) << ", das " << mean_of(das) << ", ris "
       << mean_of(ris) << "; paired margins (+/- stderr) vs fixed_index " << mf.first << " (" << mf.second
       << "), vs das " << md.first << " (" << md.second << "), vs ris " << mr.first << " (" << mr.second
       << "); assignment moved from its random start in " << moved << "/" << R << " runs";
    return {mf.first > 0.0 && md.first > 0.0 && mr.first > 0.0, os.str()};
}

// 8. sweep trends
Outcome trends()
{
    const SystemConfig cfg;
    auto means = [&](Axis axis, std::vector<double> values, std::vector<double> *se = nullptr) {
        SweepSpec spec;
        spec.axis = axis;
        spec.values = std::move(values);
        spec.variants = {Variant::pwm};
        spec.realizations = 20;
        spec.seed = 808;
        std::vector<double> m;
        for (const auto &c : sweep(cfg, spec))
        {
            m.push_back(c.mean);
            if (se)
                se->push_back(c.stderr_);
        }
        return m;
    };
    const auto p = means(Axis::ptot_dbm, {10, 20, 30});
    const auto k = means(Axis::K, {2, 3, 4});
    const std::vector<double> nv{16, 32, 64};
    const auto n = means(Axis::N, nv);
    std::vector<double> xse;
    const auto x = means(Axis::rician_xi, {1, 10, 100}, &xse);
    const auto a = means(Axis::a, {2, 4, 8});

    const bool p_ok = p[1] > p[0] && p[2] > p[1];
    const bool k_ok = k[1] < k[0] && k[2] < k[1];
    const double s1 = (n[1] - n[0]) / (nv[1] - nv[0]), s2 = (n[2] - n[1]) / (nv[2] - nv[1]);
    const bool n_ok = n[1] >= n[0] && n[2] >= n[1] && s2 <= s1;
    // within noise: no step rises by more than two standard errors, and the
    // end point sits below the start
    bool x_ok = x[2] < x[0];
    for (std::size_t i = 1; i < x.size(); ++i)
        x_ok = x_ok && x[i] <= x[i - 1] + 2.0 * std::hypot(xse[i], xse[i - 1]);
    const bool a_ok = a[1] >= a[0] && a[2] >= a[1];

    auto list = [](const std::vector<double> &v) {
        std::ostringstream os;
        os.precision(5);
        for (std::size_t i = 0; i < v.size(); ++i)
            os << (i ? " " : "") << v[i];
        return os.str();
    };
    std::ostringstream os;
    os << "Ptot{10,20,30} [" << list(p) << "] " << (p_ok ? "ok" : "BAD") << "; K{2,3,4} [" << list(k) << "] "
       << (k_ok ? "ok" : "BAD") << "; N{16,32,64} [" << list(n) << "] slopes " << fmt(s1, 4) << " " << fmt(s2, 4) << " "
       << (n_ok ? "ok" : "BAD") << "; xi{1,10,100} [" << list(x) << "] " << (x_ok ? "ok" : "BAD") << "; a{2,4,8} ["
       << list(a) << "] " << (a_ok ? "ok" : "BAD");
    return {p_ok && k_ok && n_ok && x_ok && a_ok, os.str()};
}

// 9. untrained unrolled network against the truncated iterative solver
Outcome unrolling()
{
    const SystemConfig cfg;
    const int T = 5;
    const EvalResult r = evaluate(cfg, default_params(cfg, T), 20, 909);
    int counter_bad = 0;
    for (const auto &t : r.bfnet)
        counter_bad += t.inner_pi_steps_total() != T;
    const double rel = std::abs(r.ratio - 1.0);
    return {rel <= 0.05 && counter_bad == 0,
            "mean pwm_bfnet " + fmt(r.mean_bfnet) + " vs truncated pwm " + fmt(r.mean_pwm) + ", relative gap " +
                fmt(rel) + " (limit 0.05); inner counter != T in " + std::to_string(counter_bad) + "/20 runs"};
}

// 10. training progress and iteration counts
Outcome training()
{
    const SystemConfig cfg;
    TrainRun run; // desk defaults: 200 samples, 10 epochs, T = 5
    const TrainableParams trained = train(cfg, run);
    const EvalResult after = evaluate(cfg, trained, 20, 1010);
    const EvalResult before = evaluate(cfg, default_params(cfg, run.unroll_T), 20, 1010);
    const double ratio = after.mean_bfnet / before.mean_bfnet;

    // iterations of the full solver to reach 99% of its converged mean rate
    std::vector<IterationTrace> full;
    for (std::uint64_t s = 0; s < 20; ++s)
        full.push_back(run_realization(cfg, Variant::pwm, 1010, s, {}));
    const auto curve = mean_wsr_curve(full);
    const double target = 0.99 * curve.back();
    const int it_pwm = iterations_to_reach(curve, target);
    const int it_net = iterations_to_reach(mean_wsr_curve(after.bfnet), target);

    std::ostringstream os;
    os.precision(5);
    os << "trained/untrained mean test WSR " << after.mean_bfnet << "/" << before.mean_bfnet << " = " << ratio
       << " (need >= 1.00); validation loss " << run.initial_validation_loss << " -> " << run.best_validation_loss
       << " (best epoch " << run.best_epoch << (run.halted ? ", halted" : "")
       << (run.best_epoch == 0 ? ", no epoch improved on the starting parameters" : "")
       << "); iterations to 99% of converged "
       << "pwm WSR " << curve.back() << ": pwm " << it_pwm << ", trained pwm_bfnet "
       << (it_net < 0 ? std::string("not reached in ") + std::to_string(run.unroll_T) : std::to_string(it_net));
    return {ratio >= 1.0, os.str()};
}

} // namespace

int main()
{
    const auto t0 = std::chrono::steady_clock::now();
    struct Criterion
    {
        const char *name;
        Outcome (*fn)();
    };
    const Criterion list[] = {{"rate_mmse_identity", rate_identity},  {"phase_ascent", phase_ascent},
                              {"block_descent", block_descent}, {"mm_majorization", majorization},
                              {"surrogate_oracles", oracles},  {"selection_optimality", selection},
                              {"architecture_ordering", ordering}, {"sweep_trends", trends},
                              {"unrolling_equivalence", unrolling}, {"training_progress", training}};
    int failed = 0, i = 0;
    for (const auto &c : list)
    {
        ++i;
        const auto t = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.fn();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i << " " << c.name << ": " << o.detail << " ["
                  << fmt(seconds_since(t), 3) << " s]" << std::endl;
    }
    const double total = seconds_since(t0);
    std::cout << "total " << fmt(total, 4) << " s, " << failed << " of 10 criteria failed" << std::endl;
    return failed == 0 ? 0 : 1;
}
