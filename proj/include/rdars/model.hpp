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

#ifndef RDARS_MODEL_HPP
#define RDARS_MODEL_HPP

#include "rdars/channel.hpp"

#include <algorithm>
#include <vector>

namespace rdars
{

/// Current iterate of the joint beamforming / mode switching solvers.
///
/// Rows 0..Nt-1 of F are the BS precoder, rows Nt..Nt+a-1 drive the connected
/// elements in the order given by `assign` (column l of the one-hot
/// assignment matrix selects element assign[l]). `a_vec` is the sparse mode
/// selection; the two encodings agree once the penalty has done its job.
/// Element indices are 0-based.
struct SolverState
{
    cmat F;
    cvec phi;
    rvec a_vec;
    std::vector<int> assign;
    cvec u;
    rvec lambda;
    double rho = 0.0;
    rvec a_prev;                  // expansion point of the selection surrogate
    std::vector<int> atilde_prev; // expansion point of the assignment surrogate

    int connected() const { return static_cast<int>(assign.size()); }
};

/// Indicator vector of the elements named by `assign`.
inline rvec assignment_indicator(const std::vector<int> &assign, int N)
{
    rvec s = rvec::Zero(N);
    for (int i : assign)
        s[i] = 1.0;
    return s;
}

/// Which propagation paths feed the effective channel. The DAS baseline
/// drops the reflected path.
struct PathMask
{
    bool reflection = true;
    bool connected = true;
};

/// Row k is the effective channel of user k: the reflected block
/// phi^H (I - A) diag(h_r,k^H) G followed by the connected block h_r,k^H Atilde.
struct EffectiveChannel
{
    cmat H; // K x (Nt + a)

    int K() const { return static_cast<int>(H.rows()); }
    int dim() const { return static_cast<int>(H.cols()); }
};

inline void check_state_dims(const ChannelSet &ch, const SolverState &st)
{
    const int N = ch.N();
    if (st.phi.size() != N || st.a_vec.size() != N)
        throw DimensionError("state: phi and a_vec must have length N = " + std::to_string(N));
    for (int i : st.assign)
        if (i < 0 || i >= N)
            throw DimensionError("state: assignment index " + std::to_string(i) + " out of range");
}

inline EffectiveChannel effective_channel(const ChannelSet &ch, const SolverState &st, PathMask paths = {})
{
    check_state_dims(ch, st);
    const int K = ch.K(), Nt = ch.Nt(), a = st.connected();
    EffectiveChannel eff;
    eff.H = cmat::Zero(K, Nt + a);
    for (int k = 0; k < K; ++k)
    {
        const cvec &h = ch.h_r[static_cast<std::size_t>(k)];
        if (paths.reflection)
        {
            // phi^H (I - A) diag(conj(h)) G as a row vector
            const cvec coeff = (st.phi.conjugate().array() * (1.0 - st.a_vec.array()) * h.conjugate().array()).matrix();
            eff.H.row(k).head(Nt) = coeff.transpose() * ch.G;
        }
        if (paths.connected)
            for (int l = 0; l < a; ++l)
                eff.H(k, Nt + l) = std::conj(h[st.assign[static_cast<std::size_t>(l)]]);
    }
    return eff;
}

struct RateResult
{
    rvec sinr;
    rvec rate; // bits/s/Hz
};

/// SINR and rate of every user for precoder F and noise power sigma2.
inline RateResult sinr_and_rate(const EffectiveChannel &h, const cmat &F, double sigma2)
{
    if (F.rows() != h.dim())
        throw DimensionError("sinr_and_rate: F rows do not match the effective channel");
    const cmat HF = h.H * F; // (k, m) = h_k f_m
    const int K = h.K();
    RateResult out{rvec(K), rvec(K)};
    for (int k = 0; k < K; ++k)
    {
        const double total = HF.row(k).squaredNorm();
        const double sig = std::norm(HF(k, k));
        const double gamma = sig / (total - sig + sigma2);
        out.sinr[k] = gamma;
        out.rate[k] = std::log2(1.0 + gamma);
    }
    return out;
}

inline double wsr(const rvec &alpha, const rvec &rate)
{
    if (alpha.size() != rate.size())
        throw DimensionError("wsr: weight and rate lengths differ");
    return alpha.dot(rate);
}

/// MSE of user k's detector u_k with the transmit-power-normalised noise
/// term (sigma2 / Ptot) * ||F||_F^2. `hk` is the user's effective channel row.
inline double mse_e_k(const Eigen::Ref<const Eigen::RowVectorXcd> &hk, const cmat &F, int k, cplx u, double sigma2,
                      double ptot)
{
    if (!(ptot > 0.0))
        throw Error("mse_e_k: Ptot must be positive");
    const Eigen::RowVectorXcd hF = hk * F;
    const double quad = hF.squaredNorm() + sigma2 / ptot * F.squaredNorm();
    const double e = 1.0 - 2.0 * std::real(std::conj(u) * hF[k]) + std::norm(u) * quad;
    const double scale = 1.0 + 2.0 * std::abs(u * hF[k]) + std::norm(u) * quad;
    if (e < -1e-12 * scale)
        throw NumericalFault("mse_e_k: negative MSE " + std::to_string(e) + " for user " + std::to_string(k));
    return std::max(e, 0.0);
}

inline rvec mse_all(const EffectiveChannel &h, const cmat &F, const cvec &u, double sigma2, double ptot)
{
    rvec e(h.K());
    for (int k = 0; k < h.K(); ++k)
        e[k] = mse_e_k(h.H.row(k), F, k, u[k], sigma2, ptot);
    return e;
}

/// MMSE 1 - |h_k f_k|^2 / J_k with J_k = sum_m |h_k f_m|^2 + (sigma2/Ptot) ||F||^2.
/// Invariant under scaling F.
inline rvec mmse(const EffectiveChannel &h, const cmat &F, double sigma2, double ptot)
{
    const cmat HF = h.H * F;
    const double noise = sigma2 / ptot * F.squaredNorm();
    rvec e(h.K());
    for (int k = 0; k < h.K(); ++k)
    {
        const double J = HF.row(k).squaredNorm() + noise;
        e[k] = J > 0.0 ? (J - std::norm(HF(k, k))) / J : 1.0;
    }
    return e;
}

/// Rates with the power-normalised noise term; equal to the physical rates
/// whenever Tr(F F^H) = Ptot.
inline rvec normalized_rates(const EffectiveChannel &h, const cmat &F, double sigma2, double ptot)
{
    const double fro = F.squaredNorm();
    if (fro == 0.0)
        return rvec::Zero(h.K());
    return sinr_and_rate(h, F, sigma2 * fro / ptot).rate;
}

} // namespace rdars

#endif
