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

#ifndef RDARS_CHANNEL_HPP
#define RDARS_CHANNEL_HPP

#include "rdars/config.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace rdars
{

/// Uniform linear array response with half-wavelength spacing, unit 2-norm.
/// `theta` is the spatial frequency (direction cosine) in [-1, 1].
inline cvec steering_vector(int n, double theta)
{
    if (n < 1)
        throw DimensionError("steering_vector: element count must be positive");
    cvec b(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m)
        b[m] = std::polar(scale, std::numbers::pi * theta * m);
    return b;
}

/// Planar array response b(nz, chi) (x) b(ny, psi).
inline cvec planar_steering(int nz, int ny, double chi, double psi)
{
    if (nz < 1 || ny < 1)
        throw DimensionError("planar_steering: both dimensions must be positive");
    const cvec bz = steering_vector(nz, chi);
    const cvec by = steering_vector(ny, psi);
    cvec out(nz * ny);
    for (int i = 0; i < nz; ++i)
        out.segment(i * ny, ny) = bz[i] * by;
    return out;
}

/// Large-scale power gain c0 (d / 1 m)^-delta with c0 given as a loss in dB.
inline double path_gain(double d, double delta, double c0_db)
{
    if (!(d > 0.0))
        throw Error("path_gain: distance must be positive");
    return std::pow(10.0, -c0_db / 10.0) * std::pow(d, -delta);
}

/// One channel realization. G is N x Nt, h_r[k] has length N.
struct ChannelSet
{
    cmat G;
    std::vector<cvec> h_r;
    cplx kappa_b;
    std::vector<cplx> kappa_r;
    std::vector<Point3> ue_pos;

    int N() const { return static_cast<int>(G.rows()); }
    int Nt() const { return static_cast<int>(G.cols()); }
    int K() const { return static_cast<int>(h_r.size()); }

    bool finite() const
    {
        if (!G.allFinite())
            return false;
        for (const auto &h : h_r)
            if (!h.allFinite())
                return false;
        return true;
    }
};

namespace detail
{
inline double distance(const Point3 &p, const Point3 &q)
{
    const double dx = q[0] - p[0], dy = q[1] - p[1], dz = q[2] - p[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Direction cosine of the unit vector p -> q along `axis` (0 = x, 1 = y, 2 = z).
inline double direction_cosine(const Point3 &p, const Point3 &q, int axis)
{
    return (q[static_cast<std::size_t>(axis)] - p[static_cast<std::size_t>(axis)]) / distance(p, q);
}
} // namespace detail

/// Draws one Rician realization.
///
/// Geometry: the BS array is a ULA along y; the surface is a planar array in
/// the y-z plane (vertical axis z, horizontal axis y). LoS spatial
/// frequencies are the direction cosines of the link along those axes. The
/// LoS array responses are scaled to unit-modulus entries so that the LoS
/// and NLoS parts carry the same average power per entry. Path coefficients
/// are sqrt(path gain) with zero phase.
///
/// Draw order: user drops, then G's NLoS part (column-major), then each
/// user's NLoS vector.
inline ChannelSet generate_channels(const SystemConfig &cfg, std::mt19937_64 &rng)
{
    cfg.validate();
    ChannelSet ch;
    const int N = cfg.N, Nt = cfg.Nt, K = cfg.K;
    const double xi = cfg.rician_xi;
    const double w_los = std::sqrt(xi / (xi + 1.0));
    const double w_nlos = std::sqrt(1.0 / (xi + 1.0));

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ch.ue_pos.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
    {
        const double r = cfg.ue_radius * std::sqrt(unif(rng));
        const double ang = 2.0 * std::numbers::pi * unif(rng);
        ch.ue_pos[static_cast<std::size_t>(k)] = {cfg.ue_center[0] + r * std::cos(ang),
                                                  cfg.ue_center[1] + r * std::sin(ang), cfg.ue_center[2]};
    }

    // BS -> surface
    const double d_b = detail::distance(cfg.pos_bs, cfg.pos_rdars);
    ch.kappa_b = std::sqrt(path_gain(d_b, cfg.delta_b, cfg.pathloss_c0_db));
    const double theta = detail::direction_cosine(cfg.pos_bs, cfg.pos_rdars, 1);
    const double chi = detail::direction_cosine(cfg.pos_rdars, cfg.pos_bs, 2);
    const double psi = detail::direction_cosine(cfg.pos_rdars, cfg.pos_bs, 1);
    const cvec los_rx = planar_steering(cfg.Nz, cfg.Ny, chi, psi) * std::sqrt(static_cast<double>(N));
    const cvec los_tx = steering_vector(Nt, theta) * std::sqrt(static_cast<double>(Nt));
    cmat nlos(N, Nt);
    for (int c = 0; c < Nt; ++c)
        for (int r = 0; r < N; ++r)
            nlos(r, c) = complex_normal(rng);
    ch.G = ch.kappa_b * (w_los * los_rx * los_tx.adjoint() + w_nlos * nlos);

    // surface -> users
    ch.h_r.resize(static_cast<std::size_t>(K));
    ch.kappa_r.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
    {
        const Point3 &ue = ch.ue_pos[static_cast<std::size_t>(k)];
        const double d_r = detail::distance(cfg.pos_rdars, ue);
        const cplx kr = std::sqrt(path_gain(d_r, cfg.delta_r, cfg.pathloss_c0_db));
        const double phi_k = detail::direction_cosine(cfg.pos_rdars, ue, 2);
        const double ups_k = detail::direction_cosine(cfg.pos_rdars, ue, 1);
        const cvec los = planar_steering(cfg.Nz, cfg.Ny, phi_k, ups_k) * std::sqrt(static_cast<double>(N));
        cvec h(N);
        for (int n = 0; n < N; ++n)
            h[n] = complex_normal(rng);
        ch.h_r[static_cast<std::size_t>(k)] = kr * (w_los * los + w_nlos * h);
        ch.kappa_r[static_cast<std::size_t>(k)] = kr;
    }
    return ch;
}

/// Realization `index` of a run seeded with `seed`.
inline ChannelSet generate_channels(const SystemConfig &cfg, std::uint64_t seed, std::uint64_t index)
{
    auto rng = make_rng(seed, index, 0xC4A7);
    return generate_channels(cfg, rng);
}

} // namespace rdars

#endif
