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

#ifndef RDARS_CONFIG_HPP
#define RDARS_CONFIG_HPP

#include "rdars/types.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <sstream>
#include <vector>

namespace rdars
{

using Point3 = std::array<double, 3>;

/// Scenario scalars shared by every module. Defaults are the desk-scale
/// scenario: 8 BS antennas, a 4x8 surface with 4 connected elements, 2 users.
struct SystemConfig
{
    int K = 2;                 // users
    int Nt = 8;                // BS antennas
    int N = 32;                // surface elements
    int Nz = 4;                // vertical elements
    int Ny = 8;                // horizontal elements
    int a = 4;                 // connected elements
    double Ptot_dbm = 20.0;
    double sigma2_dbm = -80.0; // per-user noise, same for every user
    std::vector<double> alpha; // user weights; empty means all ones
    double rician_xi = 10.0;   // linear Rician factor
    double pathloss_c0_db = 60.4;
    double delta_b = 2.2;      // BS -> surface exponent
    double delta_r = 2.4;      // surface -> UE exponent
    Point3 pos_bs{0.0, 0.0, 15.0};
    Point3 pos_rdars{10.0, 0.0, 15.0};
    Point3 ue_center{10.0, 50.0, 2.0};
    double ue_radius = 5.0;
    double rho0 = 1e6;
    double eta = 1e-3;
    int max_outer_iters = 100;
    double tol_outer = 1e-4;
    int max_inner_pi = 200;
    double tol_inner = 1e-6;
    std::uint64_t seed = 1;
    // Where the DAS baseline puts its distributed antennas: "pwm" reuses the
    // positions chosen by the RDARS solve, "first" uses elements 1..a.
    std::string das_positions = "pwm";

    double ptot() const { return dbm_to_watts(Ptot_dbm); }
    double sigma2() const { return dbm_to_watts(sigma2_dbm); }

    rvec weights() const
    {
        if (alpha.empty())
            return rvec::Ones(K);
        return Eigen::Map<const rvec>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
    }

    void validate() const
    {
        if (K < 1)
            throw ConfigError("K", "at least one user is required");
        if (Nt < 1)
            throw ConfigError("Nt", "at least one BS antenna is required");
        if (N < 2)
            throw ConfigError("N", "the surface needs at least two elements");
        if (Nz < 1 || Ny < 1 || Nz * Ny != N)
            throw ConfigError("Nz", "Nz * Ny must equal N (" + std::to_string(Nz) + " * " + std::to_string(Ny) +
                                        " != " + std::to_string(N) + ")");
        if (a < 1 || a >= N)
            throw ConfigError("a", "connected-element count must satisfy 1 <= a < N (got a = " + std::to_string(a) +
                                       ", N = " + std::to_string(N) + ")");
        if (!(rician_xi > 0.0))
            throw ConfigError("rician_xi", "Rician factor must be positive");
        if (!(rho0 > 0.0))
            throw ConfigError("rho0", "initial penalty must be positive");
        if (!(eta > 0.0 && eta <= 1.0))
            throw ConfigError("eta", "penalty step must lie in (0, 1]");
        if (!alpha.empty())
        {
            if (static_cast<int>(alpha.size()) != K)
                throw ConfigError("alpha", "expected " + std::to_string(K) + " weights, got " +
                                               std::to_string(alpha.size()));
            bool any_positive = false;
            for (double w : alpha)
            {
                if (!(w >= 0.0))
                    throw ConfigError("alpha", "weights must be nonnegative");
                any_positive = any_positive || w > 0.0;
            }
            if (!any_positive)
                throw ConfigError("alpha", "weights must not all be zero");
        }
        if (!(ue_radius >= 0.0))
            throw ConfigError("ue_radius", "radius must be nonnegative");
        if (max_outer_iters < 0)
            throw ConfigError("max_outer_iters", "must be nonnegative");
        if (max_inner_pi < 1)
            throw ConfigError("max_inner_pi", "must be at least 1");
        if (!(tol_outer >= 0.0) || !(tol_inner >= 0.0))
            throw ConfigError("tol_outer", "tolerances must be nonnegative");
        if (das_positions != "pwm" && das_positions != "first")
            throw ConfigError("das_positions", "expected \"pwm\" or \"first\"");
    }

    /// Sets N and picks the most square Nz x Ny factorisation with Nz <= Ny.
    void set_elements(int n)
    {
        N = n;
        Nz = 1;
        for (int d = 1; d * d <= n; ++d)
            if (n % d == 0)
                Nz = d;
        Ny = n / Nz;
    }
};

inline void to_json(nlohmann::json &j, const SystemConfig &c)
{
    j = nlohmann::json{{"K", c.K},
                       {"Nt", c.Nt},
                       {"N", c.N},
                       {"Nz", c.Nz},
                       {"Ny", c.Ny},
                       {"a", c.a},
                       {"Ptot_dbm", c.Ptot_dbm},
                       {"sigma2_dbm", c.sigma2_dbm},
                       {"alpha", c.alpha.empty() ? std::vector<double>(static_cast<std::size_t>(c.K), 1.0) : c.alpha},
                       {"rician_xi", c.rician_xi},
                       {"pathloss_c0_db", c.pathloss_c0_db},
                       {"delta_b", c.delta_b},
                       {"delta_r", c.delta_r},
                       {"pos_bs", c.pos_bs},
                       {"pos_rdars", c.pos_rdars},
                       {"ue_center", c.ue_center},
                       {"ue_radius", c.ue_radius},
                       {"rho0", c.rho0},
                       {"eta", c.eta},
                       {"max_outer_iters", c.max_outer_iters},
                       {"tol_outer", c.tol_outer},
                       {"max_inner_pi", c.max_inner_pi},
                       {"tol_inner", c.tol_inner},
                       {"seed", c.seed},
                       {"das_positions", c.das_positions}};
}

namespace detail
{
template <typename T>
void read_field(const nlohmann::json &j, const char *key, T &out)
{
    auto it = j.find(key);
    if (it == j.end())
        return;
    try
    {
        out = it->get<T>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
}
} // namespace detail

/// Missing keys keep their defaults; unknown keys are rejected so that typos
/// do not silently fall back to a default.
inline void from_json(const nlohmann::json &j, SystemConfig &c)
{
    static const char *known[] = {"K",        "Nt",          "N",        "Nz",      "Ny",         "a",
                                  "Ptot_dbm", "sigma2_dbm",  "alpha",    "rician_xi", "pathloss_c0_db",
                                  "delta_b",  "delta_r",     "pos_bs",   "pos_rdars", "ue_center",
                                  "ue_radius", "rho0",       "eta",      "max_outer_iters", "tol_outer",
                                  "max_inner_pi", "tol_inner", "seed",   "das_positions"};
    if (!j.is_object())
        throw ConfigError("<root>", "config must be a JSON object");
    for (const auto &item : j.items())
    {
        bool ok = false;
        for (const char *k : known)
            ok = ok || item.key() == k;
        if (!ok)
            throw ConfigError(item.key(), "unknown config key");
    }
    detail::read_field(j, "K", c.K);
    detail::read_field(j, "Nt", c.Nt);
    detail::read_field(j, "N", c.N);
    detail::read_field(j, "Nz", c.Nz);
    detail::read_field(j, "Ny", c.Ny);
    detail::read_field(j, "a", c.a);
    detail::read_field(j, "Ptot_dbm", c.Ptot_dbm);
    detail::read_field(j, "sigma2_dbm", c.sigma2_dbm);
    detail::read_field(j, "alpha", c.alpha);
    detail::read_field(j, "rician_xi", c.rician_xi);
    detail::read_field(j, "pathloss_c0_db", c.pathloss_c0_db);
    detail::read_field(j, "delta_b", c.delta_b);
    detail::read_field(j, "delta_r", c.delta_r);
    detail::read_field(j, "pos_bs", c.pos_bs);
    detail::read_field(j, "pos_rdars", c.pos_rdars);
    detail::read_field(j, "ue_center", c.ue_center);
    detail::read_field(j, "ue_radius", c.ue_radius);
    detail::read_field(j, "rho0", c.rho0);
    detail::read_field(j, "eta", c.eta);
    detail::read_field(j, "max_outer_iters", c.max_outer_iters);
    detail::read_field(j, "tol_outer", c.tol_outer);
    detail::read_field(j, "max_inner_pi", c.max_inner_pi);
    detail::read_field(j, "tol_inner", c.tol_inner);
    detail::read_field(j, "seed", c.seed);
    detail::read_field(j, "das_positions", c.das_positions);
}

inline SystemConfig parse_config(const std::string &text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ConfigError("<file>", e.what());
    }
    SystemConfig c = j.get<SystemConfig>();
    c.validate();
    return c;
}

inline SystemConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline std::string dump_config(const SystemConfig &c) { return nlohmann::json(c).dump(2); }

} // namespace rdars

#endif
