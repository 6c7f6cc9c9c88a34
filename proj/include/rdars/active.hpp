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

#ifndef RDARS_ACTIVE_HPP
#define RDARS_ACTIVE_HPP

#include "rdars/counters.hpp"
#include "rdars/model.hpp"

namespace rdars
{

/// Receive coefficients u_k = h_k f_k / J_k, J_k = sum_m |h_k f_m|^2 + (sigma2/Ptot) ||F||^2.
inline cvec update_u(const EffectiveChannel &h, const cmat &F, double sigma2, double ptot)
{
    const cmat HF = h.H * F;
    const double noise = sigma2 / ptot * F.squaredNorm();
    cvec u(h.K());
    for (int k = 0; k < h.K(); ++k)
    {
        const double J = HF.row(k).squaredNorm() + noise;
        if (J < 0.0 || !std::isfinite(J))
            throw NumericalFault("update_u: non-positive J for user " + std::to_string(k));
        u[k] = J > 0.0 ? HF(k, k) / J : cplx{0.0, 0.0};
    }
    return u;
}

inline rvec update_lambda(const rvec &e)
{
    rvec lambda(e.size());
    for (Eigen::Index k = 0; k < e.size(); ++k)
    {
        if (!(e[k] > 0.0))
            throw NumericalFault("update_lambda: MSE of user " + std::to_string(k) + " is not positive");
        lambda[k] = 1.0 / e[k];
    }
    return lambda;
}

namespace detail
{
// Cholesky of a Hermitian matrix that must be positive definite.
inline Eigen::LLT<cmat> hpd_factor(const cmat &M, const char *who)
{
    Eigen::LLT<cmat> llt(M);
    ++counters().factorizations;
    const double tr = M.diagonal().real().sum();
    if (llt.info() != Eigen::Success)
        throw NumericalFault(std::string(who) + ": matrix is not positive definite");
    const auto d = llt.matrixLLT().diagonal().real();
    if (d.minCoeff() * d.minCoeff() <= 1e-12 * tr)
        throw NumericalFault(std::string(who) + ": matrix is numerically singular");
    return llt;
}
} // namespace detail

/// Closed-form WMMSE precoder for fixed (u, lambda). The Gram matrix sums
/// each user's own channel: sum_m alpha_m |u_m|^2 lambda_m ((sigma2/Ptot) I + h_m^H h_m).
/// No power scaling here.
inline cmat update_f(const EffectiveChannel &h, const cvec &u, const rvec &lambda, const rvec &alpha, double sigma2,
                     double ptot)
{
    const int K = h.K(), n = h.dim();
    cmat F = cmat::Zero(n, K);
    rvec w(K);
    for (int m = 0; m < K; ++m)
        w[m] = alpha[m] * std::norm(u[m]) * lambda[m];
    if (w.sum() == 0.0)
        return F;
    cmat gram = cmat::Identity(n, n) * (sigma2 / ptot * w.sum());
    for (int m = 0; m < K; ++m)
        gram.noalias() += w[m] * h.H.row(m).adjoint() * h.H.row(m);
    auto llt = detail::hpd_factor(gram, "update_f");
    cmat rhs(n, K);
    for (int k = 0; k < K; ++k)
        rhs.col(k) = alpha[k] * u[k] * lambda[k] * h.H.row(k).adjoint();
    F = llt.solve(rhs);
    counters().linear_solves += K;
    return F;
}

/// Rescales F so that Tr(F F^H) = ptot.
inline cmat scale_to_power(const cmat &F, double ptot)
{
    const double p = F.squaredNorm();
    if (!(p > 0.0))
        throw NumericalFault("scale_to_power: zero precoder cannot be scaled");
    return F * std::sqrt(ptot / p);
}

struct InitResult
{
    cmat F;
    bool zero_forcing = false; // ZF branch taken
    bool fell_back = false;    // ZF requested but the channel was rank deficient
};

/// Zero-forcing precoder H^H (H H^H)^-1, unscaled. Returns false when
/// H H^H is not safely invertible.
inline bool zero_forcing(const EffectiveChannel &h, cmat &out)
{
    const cmat gram = h.H * h.H.adjoint();
    Eigen::LLT<cmat> llt(gram);
    ++counters().factorizations;
    if (llt.info() != Eigen::Success)
        return false;
    const auto d = llt.matrixLLT().diagonal().real();
    if (d.minCoeff() <= 1e-7 * d.maxCoeff())
        return false;
    out = h.H.adjoint() * llt.solve(cmat::Identity(h.K(), h.K()));
    counters().linear_solves += h.K();
    return true;
}

/// MRT when Ptot / (K sigma2) < 10 dB, ZF otherwise; then scaled to Ptot.
inline InitResult mrt_zf_init(const EffectiveChannel &h, double ptot, double sigma2)
{
    InitResult r;
    const double snr = ptot / (h.K() * sigma2);
    if (snr >= 10.0)
    {
        r.zero_forcing = zero_forcing(h, r.F);
        r.fell_back = !r.zero_forcing;
    }
    if (!r.zero_forcing)
        r.F = h.H.adjoint();
    r.F = scale_to_power(r.F, ptot);
    return r;
}

/// Regularised matched filter f_k = sqrt(p_k) v_k / ||v_k|| with
/// v_k = (I + sum_m (delta_m / sigma2) h_m^H h_m)^-1 h_k^H.
inline cmat simple_structure_f(const EffectiveChannel &h, const rvec &p, const rvec &delta, double sigma2)
{
    const int K = h.K(), n = h.dim();
    if (p.size() != K || delta.size() != K)
        throw DimensionError("simple_structure_f: p and delta need one entry per user");
    if ((p.array() < 0.0).any() || (delta.array() < 0.0).any())
        throw Error("simple_structure_f: powers and regularisation weights must be nonnegative");
    cmat M = cmat::Identity(n, n);
    for (int m = 0; m < K; ++m)
        M.noalias() += (delta[m] / sigma2) * h.H.row(m).adjoint() * h.H.row(m);
    auto llt = detail::hpd_factor(M, "simple_structure_f");
    cmat V = llt.solve(cmat(h.H.adjoint()));
    counters().linear_solves += K;
    cmat F(n, K);
    for (int k = 0; k < K; ++k)
    {
        const double nv = V.col(k).norm();
        F.col(k) = nv > 0.0 ? cvec(V.col(k) * (std::sqrt(p[k]) / nv)) : cvec::Zero(n);
    }
    return F;
}

/// Softmax of `raw` scaled to sum to ptot.
inline rvec softmax_power(const rvec &raw, double ptot)
{
    if (raw.size() == 0)
        return raw;
    const double mx = raw.maxCoeff();
    rvec e = (raw.array() - mx).exp();
    return e * (ptot / e.sum());
}

/// |sum alpha_k log2(1/e_k^mmse) - sum alpha_k R_k| with both sides using the
/// power-normalised noise. Zero up to rounding for any state.
inline double rate_mmse_identity_gap(const EffectiveChannel &h, const cmat &F, double sigma2, double ptot,
                                    const rvec &alpha)
{
    if (F.squaredNorm() == 0.0)
        return 0.0;
    const rvec e = mmse(h, F, sigma2, ptot);
    const rvec R = normalized_rates(h, F, sigma2, ptot);
    double lhs = 0.0;
    for (int k = 0; k < h.K(); ++k)
        lhs += alpha[k] * std::log2(1.0 / e[k]);
    return std::abs(lhs - alpha.dot(R));
}

} // namespace rdars

#endif
