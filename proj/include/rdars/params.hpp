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

#ifndef RDARS_PARAMS_HPP
#define RDARS_PARAMS_HPP

#include "rdars/config.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace rdars
{

/// Trainable scalars of the unrolled solver.
///
/// log_eps[i] scales the diagonal shift of the phase update in step i
/// (step 0 is the warm-up) relative to choose_eps, so zero reproduces the
/// default shift. log_rho[i] is the log penalty used by unrolled iteration i;
/// the last entry is kept for file compatibility and is not read by the
/// forward pass. p_raw and d_raw feed softmax_power.
struct TrainableParams
{
    int unroll_T = 0;
    std::vector<double> log_eps;
    std::vector<double> log_rho;
    std::vector<double> p_raw;
    std::vector<double> d_raw;

    int K() const { return static_cast<int>(p_raw.size()); }
    std::size_t size() const { return log_eps.size() + log_rho.size() + p_raw.size() + d_raw.size(); }

    void check(int T, int K) const
    {
        if (unroll_T != T)
            throw ParamsError("unroll_T", "file has " + std::to_string(unroll_T) + ", configuration expects " +
                                              std::to_string(T));
        if (log_eps.size() != static_cast<std::size_t>(T + 1))
            throw ParamsError("log_eps", "expected " + std::to_string(T + 1) + " entries");
        if (log_rho.size() != static_cast<std::size_t>(T + 1))
            throw ParamsError("log_rho", "expected " + std::to_string(T + 1) + " entries");
        if (p_raw.size() != static_cast<std::size_t>(K))
            throw ParamsError("p_raw", "expected " + std::to_string(K) + " entries");
        if (d_raw.size() != static_cast<std::size_t>(K))
            throw ParamsError("d_raw", "expected " + std::to_string(K) + " entries");
    }

    // Flat view used by the optimiser: log_eps, log_rho, p_raw, d_raw.
    std::vector<double> flatten() const
    {
        std::vector<double> v;
        v.reserve(size());
        for (const auto *part : {&log_eps, &log_rho, &p_raw, &d_raw})
            v.insert(v.end(), part->begin(), part->end());
        return v;
    }

    void unflatten(const std::vector<double> &v)
    {
        if (v.size() != size())
            throw ParamsError("", "flat parameter vector has the wrong length");
        std::size_t o = 0;
        for (auto *part : {&log_eps, &log_rho, &p_raw, &d_raw})
            for (double &x : *part)
                x = v[o++];
    }
};

/// Untrained values: unit shift multipliers, the geometric schedule
/// rho0 * eta^i, and equal power / regularisation splits.
inline TrainableParams default_params(const SystemConfig &cfg, int unroll_T)
{
    if (unroll_T < 0)
        throw ParamsError("unroll_T", "must be nonnegative");
    TrainableParams p;
    p.unroll_T = unroll_T;
    p.log_eps.assign(static_cast<std::size_t>(unroll_T + 1), 0.0);
    for (int i = 0; i <= unroll_T; ++i)
        p.log_rho.push_back(std::log(cfg.rho0) + i * std::log(cfg.eta));
    p.p_raw.assign(static_cast<std::size_t>(cfg.K), 0.0);
    p.d_raw.assign(static_cast<std::size_t>(cfg.K), 0.0);
    return p;
}

inline constexpr int params_version = 1;

inline std::string params_to_string(const TrainableParams &p)
{
    std::ostringstream os;
    os.precision(17);
    auto arr = [&](const char *name, const std::vector<double> &v, bool last) {
        os << "  \"" << name << "\": [";
        for (std::size_t i = 0; i < v.size(); ++i)
            os << (i ? ", " : "") << v[i];
        os << "]" << (last ? "\n" : ",\n");
    };
    os << "{\n  \"version\": " << params_version << ",\n  \"unroll_T\": " << p.unroll_T << ",\n  \"K\": " << p.K()
       << ",\n";
    arr("log_eps", p.log_eps, false);
    arr("log_rho", p.log_rho, false);
    arr("p_raw", p.p_raw, false);
    arr("d_raw", p.d_raw, true);
    os << "}\n";
    return os.str();
}

inline TrainableParams params_from_string(const std::string &text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ParamsError("", std::string("malformed parameter file: ") + e.what());
    }
    if (!j.is_object())
        throw ParamsError("", "parameter file must hold an object");
    auto need = [&](const char *name) -> const nlohmann::json & {
        if (!j.contains(name))
            throw ParamsError(name, "missing field");
        return j.at(name);
    };
    auto get_vec = [&](const char *name) {
        const auto &v = need(name);
        if (!v.is_array())
            throw ParamsError(name, "expected an array of numbers");
        std::vector<double> out;
        for (const auto &x : v)
        {
            if (!x.is_number())
                throw ParamsError(name, "expected an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    };
    const auto &ver = need("version");
    if (!ver.is_number_integer() || ver.get<int>() != params_version)
        throw ParamsError("version", "unsupported version");
    const auto &T = need("unroll_T");
    if (!T.is_number_integer() || T.get<int>() < 0)
        throw ParamsError("unroll_T", "expected a nonnegative integer");
    const auto &K = need("K");
    if (!K.is_number_integer() || K.get<int>() < 1)
        throw ParamsError("K", "expected a positive integer");
    TrainableParams p;
    p.unroll_T = T.get<int>();
    p.log_eps = get_vec("log_eps");
    p.log_rho = get_vec("log_rho");
    p.p_raw = get_vec("p_raw");
    p.d_raw = get_vec("d_raw");
    p.check(p.unroll_T, K.get<int>());
    return p;
}

inline void save_params(const TrainableParams &p, const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw ParamsError("", "cannot write " + path);
    out << params_to_string(p);
}

inline TrainableParams load_params(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ParamsError("", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return params_from_string(ss.str());
}

} // namespace rdars

#endif
