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

#ifndef RDARS_SOLVER_HPP
#define RDARS_SOLVER_HPP

#include "rdars/active.hpp"
#include "rdars/channel.hpp"
#include "rdars/config.hpp"
#include "rdars/mode_switch.hpp"
#include "rdars/params.hpp"
#include "rdars/passive.hpp"

#include <chrono>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace rdars
{

enum class Variant
{
    pwm,
    pwm_bfnet,
    fixed_index,
    ris,
    das
};

inline const char *variant_name(Variant v)
{
    switch (v)
    {
    case Variant::pwm:
        return "pwm";
    case Variant::pwm_bfnet:
        return "pwm_bfnet";
    case Variant::fixed_index:
        return "fixed_index";
    case Variant::ris:
        return "ris";
    case Variant::das:
        return "das";
    }
    return "?";
}

inline Variant parse_variant(const std::string &s)
{
    for (Variant v : {Variant::pwm, Variant::pwm_bfnet, Variant::fixed_index, Variant::ris, Variant::das})
        if (s == variant_name(v))
            return v;
    throw ConfigError("variant", "unknown variant '" + s + "' (expected pwm, pwm_bfnet, fixed_index, ris or das)");
}

struct SolveOptions
{
    Variant variant = Variant::pwm;
    std::optional<TrainableParams> trainable; // pwm_bfnet only; defaults are used when absent
    int unroll_T = 5;
    bool fixed_rho_mode = false;              // eta forced to 1
    std::optional<int> max_outer_iters;       // overrides the config
    std::optional<double> tol_outer;          // overrides the config; 0 disables early exit
    std::uint64_t stream = 0;                 // initialisation stream (realisation index)
};

struct IterationRecord
{
    int iteration = 0; // 0 is the initial point
    double wsr = 0.0;  // bits/s/Hz of the feasibility-enforced state
    double penalized_obj = 0.0;
    double penalty_residual = 0.0;
    int inner_pi_steps = 0;
    double rho = 0.0;
    double wall_ms = 0.0;
};

struct IterationTrace
{
    Variant variant = Variant::pwm;
    std::vector<IterationRecord> records;
    bool converged = false;
    int warmup_pi_steps = 0; // phase step taken before the unrolled iterations
    SolverState final_state;
    OpCounters counters;

    int iterations() const { return records.empty() ? 0 : static_cast<int>(records.size()) - 1; }
    double final_wsr() const { return records.empty() ? 0.0 : records.back().wsr; }

    std::int64_t inner_pi_steps_total() const
    {
        std::int64_t s = 0;
        for (const auto &r : records)
            s += r.inner_pi_steps;
        return s;
    }
};

namespace detail
{

inline constexpr double rho_floor = 1e-12;
inline constexpr std::uint64_t init_purpose = 0x1417;

// sum alpha_k (1 + ln e_k^mmse) + ||A - Atilde Atilde^H||^2 / (2 rho): the
// penalised weighted MSE with u and lambda at their optimum.
inline double penalized_objective(const ChannelSet &ch, const SolverState &st, const rvec &alpha, double sigma2,
                                  double ptot, double rho, PathMask paths)
{
    const EffectiveChannel eff = effective_channel(ch, st, paths);
    const rvec e = mmse(eff, st.F, sigma2, ptot);
    double f = 0.0;
    for (int k = 0; k < eff.K(); ++k)
        f += alpha[k] * (1.0 + std::log(e[k]));
    if (st.connected() > 0)
    {
        const double r = penalty_residual(st.a_vec, st.assign);
        f += r * r / (2.0 * rho);
    }
    return f;
}

inline SolverState enforced(const SolverState &st, int N)
{
    SolverState out = st;
    out.a_vec = assignment_indicator(st.assign, N);
    return out;
}

inline double enforced_wsr(const ChannelSet &ch, const SolverState &st, const rvec &alpha, double sigma2, double ptot,
                           PathMask paths)
{
    const EffectiveChannel eff = effective_channel(ch, enforced(st, ch.N()), paths);
    return wsr(alpha, normalized_rates(eff, st.F, sigma2, ptot));
}

inline void refresh_u_lambda(const ChannelSet &ch, SolverState &st, double sigma2, double ptot, PathMask paths)
{
    const EffectiveChannel eff = effective_channel(ch, st, paths);
    st.u = update_u(eff, st.F, sigma2, ptot);
    st.lambda = update_lambda(mse_all(eff, st.F, st.u, sigma2, ptot));
}

inline void refresh_f(const ChannelSet &ch, SolverState &st, const rvec &alpha, double sigma2, double ptot,
                      PathMask paths)
{
    const EffectiveChannel eff = effective_channel(ch, st, paths);
    st.F = scale_to_power(update_f(eff, st.u, st.lambda, alpha, sigma2, ptot), ptot);
}

// Uniform phases, then `a` distinct uniform indices.
inline void random_start(SolverState &st, int N, int a, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    st.phi.resize(N);
    for (int n = 0; n < N; ++n)
        st.phi[n] = std::polar(1.0, ph(rng));
    std::vector<int> pool(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n)
        pool[static_cast<std::size_t>(n)] = n;
    st.assign.clear();
    for (int l = 0; l < a; ++l)
    {
        std::uniform_int_distribution<int> pick(l, N - 1);
        std::swap(pool[static_cast<std::size_t>(l)], pool[static_cast<std::size_t>(pick(rng))]);
        st.assign.push_back(pool[static_cast<std::size_t>(l)]);
    }
    st.a_vec = assignment_indicator(st.assign, N);
}

// Selection and assignment updates. The assignment candidate is kept only if
// it does not raise the linearised surrogate, which preserves descent when
// the conflict resolution misses the optimum.
inline void mode_switch_step(const ChannelSet &ch, SolverState &st, const rvec &alpha, double rho)
{
    st.atilde_prev = st.assign;
    const AssignmentSurrogate as = build_assignment_surrogate(ch, st, alpha, rho);
    const std::vector<int> cand = select_assignment(as.c, ch.N(), st.connected());
    if (as.linear_value(cand) < as.linear_value(st.assign))
        st.assign = cand;
    st.a_prev = st.a_vec;
    const SelectionSurrogate ss = build_selection_surrogate(ch, st, alpha, rho);
    st.a_vec = select_a(ss.r6, st.connected());
}

struct Blocks
{
    bool passive = true;
    bool mode_switch = true;
    PathMask paths{};
};

class Stopwatch
{
  public:
    double lap_ms()
    {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

  private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline IterationRecord make_record(const ChannelSet &ch, const SolverState &st, const rvec &alpha, double sigma2,
                                   double ptot, double rho, PathMask paths, int it, int steps, double ms)
{
    IterationRecord r;
    r.iteration = it;
    r.wsr = enforced_wsr(ch, st, alpha, sigma2, ptot, paths);
    r.penalized_obj = penalized_objective(ch, st, alpha, sigma2, ptot, rho, paths);
    r.penalty_residual = st.connected() > 0 ? penalty_residual(st.a_vec, st.assign) : 0.0;
    r.inner_pi_steps = steps;
    r.rho = rho;
    r.wall_ms = ms;
    if (!std::isfinite(r.wsr))
        throw NumericalFault("non-finite WSR at iteration " + std::to_string(it));
    return r;
}

// Shared outer loop of the iterative solvers (the repeat loop of the alternating
// scheme, with blocks switched off for the baselines).
inline void run_alternation(const SystemConfig &cfg, const ChannelSet &ch, const SolveOptions &opts, Blocks blocks,
                            SolverState &st, IterationTrace &trace)
{
    const rvec alpha = cfg.weights();
    const double sigma2 = cfg.sigma2(), ptot = cfg.ptot();
    const double eta = opts.fixed_rho_mode ? 1.0 : cfg.eta;
    const int max_it = opts.max_outer_iters.value_or(cfg.max_outer_iters);
    const double tol = opts.tol_outer.value_or(cfg.tol_outer);
    Stopwatch sw;
    double rho = st.rho;
    trace.records.push_back(make_record(ch, st, alpha, sigma2, ptot, rho, blocks.paths, 0, 0, sw.lap_ms()));
    for (int it = 1; it <= max_it; ++it)
    {
        int steps = 0;
        try
        {
            refresh_u_lambda(ch, st, sigma2, ptot, blocks.paths);
            if (blocks.passive)
            {
                const PassiveResult pr =
                    passive_update(ch, st, alpha, PassiveMode::iterate_to_tol, cfg.max_inner_pi, cfg.tol_inner);
                st.phi = pr.phi;
                steps = pr.steps;
            }
            if (blocks.mode_switch)
                mode_switch_step(ch, st, alpha, rho);
            refresh_f(ch, st, alpha, sigma2, ptot, blocks.paths);
            trace.records.push_back(
                make_record(ch, st, alpha, sigma2, ptot, rho, blocks.paths, it, steps, sw.lap_ms()));
        }
        catch (const NumericalFault &e)
        {
            throw NumericalFault(std::string(variant_name(opts.variant)) + " iteration " + std::to_string(it) +
                                 ": " + e.what());
        }
        if (blocks.mode_switch)
            rho = std::max(update_rho(rho, eta), rho_floor);
        st.rho = rho;
        const double prev = trace.records[trace.records.size() - 2].wsr;
        const double cur = trace.records.back().wsr;
        if (std::abs(cur - prev) <= tol * std::max(std::abs(prev), 1e-12))
        {
            trace.converged = true;
            break;
        }
    }
    if (max_it == 0)
        trace.converged = true;
}

inline void finish(const ChannelSet &ch, SolverState &st, IterationTrace &trace)
{
    st = enforced(st, ch.N());
    trace.final_state = st;
    trace.counters = counters();
}

// Adaptive MRT/ZF start, then one (u, lambda, F) refresh.
inline void active_start(const SystemConfig &cfg, const ChannelSet &ch, SolverState &st, const rvec &alpha,
                         PathMask paths)
{
    st.F = mrt_zf_init(effective_channel(ch, st, paths), cfg.ptot(), cfg.sigma2()).F;
    refresh_u_lambda(ch, st, cfg.sigma2(), cfg.ptot(), paths);
    refresh_f(ch, st, alpha, cfg.sigma2(), cfg.ptot(), paths);
}

} // namespace detail

/// Alternating penalty/WMMSE solver with mode switching.
inline std::pair<SolverState, IterationTrace> pwm_solve(const SystemConfig &cfg, const ChannelSet &ch,
                                                        const SolveOptions &opts = {})
{
    cfg.validate();
    reset_counters();
    IterationTrace trace;
    trace.variant = Variant::pwm;
    SolverState st;
    auto rng = make_rng(cfg.seed, opts.stream, detail::init_purpose);
    detail::random_start(st, ch.N(), cfg.a, rng);
    st.rho = cfg.rho0;
    const rvec alpha = cfg.weights();
    detail::active_start(cfg, ch, st, alpha, {});
    detail::run_alternation(cfg, ch, opts, {true, true, {}}, st, trace);
    detail::finish(ch, st, trace);
    return {st, trace};
}

/// Same loop with elements 0..a-1 connected and the mode fixed.
inline std::pair<SolverState, IterationTrace> fixed_index_solve(const SystemConfig &cfg, const ChannelSet &ch,
                                                                const SolveOptions &opts = {})
{
    cfg.validate();
    reset_counters();
    IterationTrace trace;
    trace.variant = Variant::fixed_index;
    SolverState st;
    auto rng = make_rng(cfg.seed, opts.stream, detail::init_purpose);
    detail::random_start(st, ch.N(), cfg.a, rng);
    st.assign.clear();
    for (int l = 0; l < cfg.a; ++l)
        st.assign.push_back(l);
    st.a_vec = assignment_indicator(st.assign, ch.N());
    st.rho = cfg.rho0;
    detail::active_start(cfg, ch, st, cfg.weights(), {});
    detail::run_alternation(cfg, ch, opts, {true, false, {}}, st, trace);
    detail::finish(ch, st, trace);
    return {st, trace};
}

/// Purely reflecting surface of N elements: no connected elements and an
/// Nt x K precoder.
inline std::pair<SolverState, IterationTrace> ris_solve(const SystemConfig &cfg, const ChannelSet &ch,
                                                        const SolveOptions &opts = {})
{
    cfg.validate();
    reset_counters();
    IterationTrace trace;
    trace.variant = Variant::ris;
    SolverState st;
    auto rng = make_rng(cfg.seed, opts.stream, detail::init_purpose);
    detail::random_start(st, ch.N(), 0, rng);
    st.rho = cfg.rho0;
    detail::active_start(cfg, ch, st, cfg.weights(), {});
    detail::run_alternation(cfg, ch, opts, {true, false, {}}, st, trace);
    detail::finish(ch, st, trace);
    return {st, trace};
}

/// Distributed antennas at the connected positions with the reflected path
/// removed; WMMSE on the remaining block only. Positions come from
/// `positions` when given, otherwise from cfg.das_positions ("pwm" runs the
/// RDARS solve to obtain them).
inline std::pair<SolverState, IterationTrace> das_solve(const SystemConfig &cfg, const ChannelSet &ch,
                                                        const SolveOptions &opts = {},
                                                        const std::vector<int> *positions = nullptr)
{
    cfg.validate();
    std::vector<int> assign;
    if (positions)
        assign = *positions;
    else if (cfg.das_positions == "first")
        for (int l = 0; l < cfg.a; ++l)
            assign.push_back(l);
    else
    {
        SolveOptions po = opts;
        po.variant = Variant::pwm;
        assign = pwm_solve(cfg, ch, po).first.assign;
    }
    reset_counters();
    IterationTrace trace;
    trace.variant = Variant::das;
    SolverState st;
    st.phi = cvec::Ones(ch.N());
    st.assign = assign;
    st.a_vec = assignment_indicator(assign, ch.N());
    st.rho = cfg.rho0;
    const PathMask paths{false, true};
    detail::active_start(cfg, ch, st, cfg.weights(), paths);
    detail::run_alternation(cfg, ch, opts, {false, false, paths}, st, trace);
    detail::finish(ch, st, trace);
    return {st, trace};
}

/// Unrolled solver: warm-up, then exactly unroll_T iterations with one phase
/// step each and per-iteration shift and penalty values.
inline std::pair<SolverState, IterationTrace> pwm_bfnet_forward(const SystemConfig &cfg, const ChannelSet &ch,
                                                                const TrainableParams &params,
                                                                const SolveOptions &opts = {})
{
    cfg.validate();
    const int T = params.unroll_T;
    params.check(T, cfg.K);
    reset_counters();
    IterationTrace trace;
    trace.variant = Variant::pwm_bfnet;
    const rvec alpha = cfg.weights();
    const double sigma2 = cfg.sigma2(), ptot = cfg.ptot();
    SolverState st;
    auto rng = make_rng(cfg.seed, opts.stream, detail::init_purpose);
    detail::random_start(st, ch.N(), cfg.a, rng);
    st.rho = std::exp(params.log_rho[0]);
    detail::Stopwatch sw;
    try
    {
        {
            const EffectiveChannel eff = effective_channel(ch, st);
            cmat F;
            if (!zero_forcing(eff, F))
                F = eff.H.adjoint();
            st.F = scale_to_power(F, ptot);
        }
        detail::refresh_u_lambda(ch, st, sigma2, ptot, {});
        detail::refresh_f(ch, st, alpha, sigma2, ptot, {});
        const PassiveResult pr = passive_update(ch, st, alpha, PassiveMode::single_step, 1, 0.0, std::nullopt,
                                                std::exp(params.log_eps[0]));
        st.phi = pr.phi;
        trace.warmup_pi_steps = pr.steps;
        const Eigen::Map<const rvec> praw(params.p_raw.data(), cfg.K), draw(params.d_raw.data(), cfg.K);
        st.F = scale_to_power(simple_structure_f(effective_channel(ch, st), softmax_power(praw, ptot),
                                                 softmax_power(draw, ptot), sigma2),
                              ptot);
    }
    catch (const NumericalFault &e)
    {
        throw NumericalFault(std::string("pwm_bfnet warm-up: ") + e.what());
    }
    trace.records.push_back(detail::make_record(ch, st, alpha, sigma2, ptot, st.rho, {}, 0, 0, sw.lap_ms()));
    for (int i = 0; i < T; ++i)
    {
        const double rho = std::max(std::exp(params.log_rho[static_cast<std::size_t>(i)]), detail::rho_floor);
        st.rho = rho;
        try
        {
            detail::refresh_u_lambda(ch, st, sigma2, ptot, {});
            const PassiveResult pr = passive_update(ch, st, alpha, PassiveMode::single_step, 1, 0.0, std::nullopt,
                                                    std::exp(params.log_eps[static_cast<std::size_t>(i + 1)]));
            st.phi = pr.phi;
            detail::mode_switch_step(ch, st, alpha, rho);
            detail::refresh_f(ch, st, alpha, sigma2, ptot, {});
            trace.records.push_back(
                detail::make_record(ch, st, alpha, sigma2, ptot, rho, {}, i + 1, pr.steps, sw.lap_ms()));
        }
        catch (const NumericalFault &e)
        {
            throw NumericalFault("pwm_bfnet iteration " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    trace.converged = true;
    detail::finish(ch, st, trace);
    return {st, trace};
}

/// Dispatch on opts.variant.
inline std::pair<SolverState, IterationTrace> solve(const SystemConfig &cfg, const ChannelSet &ch,
                                                    const SolveOptions &opts = {})
{
    switch (opts.variant)
    {
    case Variant::pwm:
        return pwm_solve(cfg, ch, opts);
    case Variant::pwm_bfnet:
        return pwm_bfnet_forward(cfg, ch, opts.trainable ? *opts.trainable : default_params(cfg, opts.unroll_T),
                                 opts);
    case Variant::fixed_index:
        return fixed_index_solve(cfg, ch, opts);
    case Variant::ris:
        return ris_solve(cfg, ch, opts);
    case Variant::das:
        return das_solve(cfg, ch, opts);
    }
    throw Error("solve: unknown variant");
}

/// Measured operation counts next to the per-solve complexity expressions
/// I (K (Nt+a)^3 + K^2 N^2 + Ip N^2 + 5 N^3) for the iterative solver and
/// I' (K (Nt+a)^2 + K^2 N^2 + 5 N^3) for the unrolled one.
struct ComplexityReport
{
    OpCounters measured;
    int iterations = 0;
    double mean_inner_pi = 0.0;
    double model_flops = 0.0;
    std::string expression;
};

inline ComplexityReport op_counters(const IterationTrace &trace, const SystemConfig &cfg)
{
    ComplexityReport r;
    r.measured = trace.counters;
    r.iterations = trace.iterations();
    r.mean_inner_pi =
        r.iterations > 0 ? static_cast<double>(trace.inner_pi_steps_total()) / r.iterations : 0.0;
    const double K = cfg.K, N = cfg.N, I = r.iterations;
    const double a = trace.final_state.connected();
    const double n = cfg.Nt + a;
    if (trace.variant == Variant::pwm_bfnet)
    {
        r.model_flops = I * (K * n * n + K * K * N * N + 5.0 * N * N * N);
        r.expression = "I' (K (Nt+a)^2 + K^2 N^2 + 5 N^3)";
    }
    else
    {
        r.model_flops = I * (K * n * n * n + K * K * N * N + r.mean_inner_pi * N * N + 5.0 * N * N * N);
        r.expression = "I (K (Nt+a)^3 + K^2 N^2 + Ip N^2 + 5 N^3)";
    }
    return r;
}

} // namespace rdars

#endif
