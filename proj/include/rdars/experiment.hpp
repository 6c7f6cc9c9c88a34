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

#ifndef RDARS_EXPERIMENT_HPP
#define RDARS_EXPERIMENT_HPP

#include "rdars/parallel.hpp"
#include "rdars/solver.hpp"
#include "rdars/train.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

namespace rdars
{

inline constexpr const char *trace_csv_header =
    "experiment_id,variant,seed,iteration,wsr_bits,penalized_obj,penalty_residual,inner_pi_steps,rho,wall_ms";

inline constexpr const char *sweep_csv_header = "axis,value,variant,realizations,mean_wsr_bits,stderr_wsr_bits";

inline void write_trace_rows(std::ostream &os, const std::string &experiment_id, Variant v, std::uint64_t seed,
                             const IterationTrace &trace)
{
    const auto old = os.precision(17);
    for (const auto &r : trace.records)
        os << experiment_id << ',' << variant_name(v) << ',' << seed << ',' << r.iteration << ',' << r.wsr << ','
           << r.penalized_obj << ',' << r.penalty_residual << ',' << r.inner_pi_steps << ',' << r.rho << ','
           << r.wall_ms << '\n';
    os.precision(old);
}

enum class Axis
{
    ptot_dbm,
    K,
    N,
    rician_xi,
    a,
    iterations
};

inline const char *axis_name(Axis a)
{
    switch (a)
    {
    case Axis::ptot_dbm:
        return "ptot_dbm";
    case Axis::K:
        return "K";
    case Axis::N:
        return "N";
    case Axis::rician_xi:
        return "rician_xi";
    case Axis::a:
        return "a";
    case Axis::iterations:
        return "iterations";
    }
    return "?";
}

inline Axis parse_axis(const std::string &s)
{
    for (Axis a : {Axis::ptot_dbm, Axis::K, Axis::N, Axis::rician_xi, Axis::a, Axis::iterations})
        if (s == axis_name(a))
            return a;
    throw ConfigError("axis", "unknown axis '" + s + "' (expected ptot_dbm, K, N, rician_xi, a or iterations)");
}

/// Copy of cfg with the axis set to `value`; iteration-count axes also fix
/// the solver budget in `opts` (no early exit).
inline SystemConfig apply_axis(const SystemConfig &cfg, Axis axis, double value, SolveOptions &opts)
{
    SystemConfig c = cfg;
    auto as_int = [&](const char *name) {
        const double r = std::round(value);
        if (std::abs(r - value) > 1e-9)
            throw ConfigError(name, "expected an integer value, got " + std::to_string(value));
        return static_cast<int>(r);
    };
    switch (axis)
    {
    case Axis::ptot_dbm:
        c.Ptot_dbm = value;
        break;
    case Axis::K:
        c.K = as_int("K");
        c.alpha.clear();
        break;
    case Axis::N:
        c.set_elements(as_int("N"));
        break;
    case Axis::rician_xi:
        c.rician_xi = value;
        break;
    case Axis::a:
        c.a = as_int("a");
        break;
    case Axis::iterations:
        c.max_outer_iters = as_int("iterations");
        opts.max_outer_iters = c.max_outer_iters;
        opts.tol_outer = 0.0;
        opts.unroll_T = c.max_outer_iters;
        break;
    }
    c.validate();
    return c;
}

inline PathMask variant_paths(Variant v) { return v == Variant::das ? PathMask{false, true} : PathMask{}; }

/// WSR of a stored state recomputed from the channel alone.
inline double recompute_wsr(const SystemConfig &cfg, const ChannelSet &ch, const SolverState &st, Variant v)
{
    const EffectiveChannel eff = effective_channel(ch, st, variant_paths(v));
    return wsr(cfg.weights(), normalized_rates(eff, st.F, cfg.sigma2(), cfg.ptot()));
}

inline nlohmann::json state_to_json(const SolverState &st)
{
    nlohmann::json j;
    std::vector<double> fre, fim, pre, pim;
    for (Eigen::Index c = 0; c < st.F.cols(); ++c)
        for (Eigen::Index r = 0; r < st.F.rows(); ++r)
        {
            fre.push_back(st.F(r, c).real());
            fim.push_back(st.F(r, c).imag());
        }
    for (Eigen::Index n = 0; n < st.phi.size(); ++n)
    {
        pre.push_back(st.phi[n].real());
        pim.push_back(st.phi[n].imag());
    }
    j["F_rows"] = st.F.rows();
    j["F_cols"] = st.F.cols();
    j["F_re"] = fre;
    j["F_im"] = fim;
    j["phi_re"] = pre;
    j["phi_im"] = pim;
    j["a_vec"] = std::vector<double>(st.a_vec.data(), st.a_vec.data() + st.a_vec.size());
    j["assign"] = st.assign;
    return j;
}

inline SolverState state_from_json(const nlohmann::json &j)
{
    SolverState st;
    const auto rows = j.at("F_rows").get<Eigen::Index>(), cols = j.at("F_cols").get<Eigen::Index>();
    const auto fre = j.at("F_re").get<std::vector<double>>(), fim = j.at("F_im").get<std::vector<double>>();
    st.F.resize(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            st.F(r, c) = {fre[static_cast<std::size_t>(c * rows + r)], fim[static_cast<std::size_t>(c * rows + r)]};
    const auto pre = j.at("phi_re").get<std::vector<double>>(), pim = j.at("phi_im").get<std::vector<double>>();
    st.phi.resize(static_cast<Eigen::Index>(pre.size()));
    for (std::size_t n = 0; n < pre.size(); ++n)
        st.phi[static_cast<Eigen::Index>(n)] = {pre[n], pim[n]};
    const auto av = j.at("a_vec").get<std::vector<double>>();
    st.a_vec = Eigen::Map<const rvec>(av.data(), static_cast<Eigen::Index>(av.size()));
    st.assign = j.at("assign").get<std::vector<int>>();
    return st;
}

struct SweepSpec
{
    Axis axis = Axis::ptot_dbm;
    std::vector<double> values;
    std::vector<Variant> variants{Variant::pwm};
    int realizations = 20;
    std::uint64_t seed = 1;
    std::optional<TrainableParams> params; // used by pwm_bfnet when sizes match
    bool keep_states = false;
};

struct SweepCell
{
    double value = 0.0;
    Variant variant = Variant::pwm;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::vector<double> wsr;          // per realisation
    std::vector<IterationTrace> traces;
};

inline double mean_of(const std::vector<double> &v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double stderr_of(const std::vector<double> &v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

/// Runs one realisation: channel index r of `seed`, initialisation stream r.
inline IterationTrace run_realization(const SystemConfig &cfg, Variant v, std::uint64_t seed, std::uint64_t r,
                                      SolveOptions opts, const std::optional<TrainableParams> &params = std::nullopt)
{
    const ChannelSet ch = generate_channels(cfg, seed, r);
    opts.variant = v;
    opts.stream = r;
    if (v == Variant::pwm_bfnet)
    {
        if (params)
            opts.trainable = params;
        else if (!opts.trainable)
            opts.trainable = default_params(cfg, opts.unroll_T);
    }
    return solve(cfg, ch, opts).second;
}

inline std::vector<SweepCell> sweep(const SystemConfig &cfg, const SweepSpec &spec, SolveOptions base = {})
{
    if (spec.values.empty())
        throw ConfigError("values", "sweep needs at least one axis value");
    if (spec.realizations < 1)
        throw ConfigError("realizations", "must be at least 1");
    std::vector<SweepCell> out;
    for (double value : spec.values)
    {
        SolveOptions o = base;
        const SystemConfig c = apply_axis(cfg, spec.axis, value, o);
        for (Variant v : spec.variants)
        {
            SweepCell cell;
            cell.value = value;
            cell.variant = v;
            cell.traces = parallel_map<IterationTrace>(static_cast<std::size_t>(spec.realizations), [&](std::size_t r) {
                return run_realization(c, v, spec.seed, r, o, spec.params);
            });
            for (const auto &t : cell.traces)
                cell.wsr.push_back(t.final_wsr());
            cell.mean = mean_of(cell.wsr);
            cell.stderr_ = stderr_of(cell.wsr);
            if (!spec.keep_states)
                cell.traces.clear();
            out.push_back(std::move(cell));
        }
    }
    return out;
}

inline void write_sweep_rows(std::ostream &os, const SweepSpec &spec, const std::vector<SweepCell> &cells)
{
    const auto old = os.precision(17);
    for (const auto &c : cells)
        os << axis_name(spec.axis) << ',' << c.value << ',' << variant_name(c.variant) << ',' << c.wsr.size() << ','
           << c.mean << ',' << c.stderr_ << '\n';
    os.precision(old);
}

/// Unrolled solver against the iterative one with the same iteration budget
/// on a fresh test set.
struct EvalResult
{
    std::vector<IterationTrace> bfnet;
    std::vector<IterationTrace> pwm;
    double mean_bfnet = 0.0;
    double mean_pwm = 0.0;
    double ratio = 0.0;
};

inline EvalResult evaluate(const SystemConfig &cfg, const TrainableParams &params, int count, std::uint64_t seed)
{
    params.check(params.unroll_T, cfg.K);
    EvalResult r;
    SolveOptions o;
    o.unroll_T = params.unroll_T;
    o.max_outer_iters = params.unroll_T;
    o.tol_outer = 0.0;
    const auto n = static_cast<std::size_t>(count);
    r.bfnet = parallel_map<IterationTrace>(n, [&](std::size_t i) {
        return run_realization(cfg, Variant::pwm_bfnet, seed, i, o, params);
    });
    r.pwm = parallel_map<IterationTrace>(n, [&](std::size_t i) {
        return run_realization(cfg, Variant::pwm, seed, i, o);
    });
    std::vector<double> b, p;
    for (std::size_t i = 0; i < n; ++i)
    {
        b.push_back(r.bfnet[i].final_wsr());
        p.push_back(r.pwm[i].final_wsr());
    }
    r.mean_bfnet = mean_of(b);
    r.mean_pwm = mean_of(p);
    r.ratio = r.mean_pwm != 0.0 ? r.mean_bfnet / r.mean_pwm : 0.0;
    return r;
}

/// Mean WSR per iteration index across traces; shorter traces are extended
/// with their final value.
inline std::vector<double> mean_wsr_curve(const std::vector<IterationTrace> &traces)
{
    std::size_t len = 0;
    for (const auto &t : traces)
        len = std::max(len, t.records.size());
    std::vector<double> out(len, 0.0);
    for (const auto &t : traces)
        for (std::size_t i = 0; i < len; ++i)
            out[i] += t.records[std::min(i, t.records.size() - 1)].wsr;
    for (double &x : out)
        x /= static_cast<double>(std::max<std::size_t>(traces.size(), 1));
    return out;
}

/// First iteration index whose curve value reaches `target`, or -1.
inline int iterations_to_reach(const std::vector<double> &curve, double target)
{
    for (std::size_t i = 0; i < curve.size(); ++i)
        if (curve[i] >= target)
            return static_cast<int>(i);
    return -1;
}

} // namespace rdars

#endif
