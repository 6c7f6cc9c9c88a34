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

#ifndef RDARS_PASSIVE_HPP
#define RDARS_PASSIVE_HPP

#include "rdars/counters.hpp"
#include "rdars/model.hpp"

#include <optional>
#include <vector>

namespace rdars
{

/// phi-dependent part of the weighted MSE, phi^H C phi + 2 Re{phi^H beta},
/// lifted to the unimodular program max p^H D p with D = [-C, -beta; -beta^H, 0].
struct PassiveQuadratic
{
    cmat C;
    cvec beta;
    cmat D;
    double eps = 0.0;

    double objective(const cvec &phi) const
    {
        return std::real(phi.dot(C * phi)) + 2.0 * std::real(phi.dot(beta));
    }
};

/// Spectral radius is bounded by the Frobenius norm, so D + eps I is PD.
inline double choose_eps(const cmat &D) { return D.norm() * (1.0 + 1e-6); }

namespace detail
{
// Per-user reflected and connected contributions of the current precoder.
//   refl[k].col(m) = (I - A) diag(h_k^H) G w_b,m    (N x K)
//   conn(k, m)     = h_k^H Atilde w_r,m
struct PathTerms
{
    std::vector<cmat> refl;
    cmat conn;
};

inline PathTerms path_terms(const ChannelSet &ch, const SolverState &st, bool apply_mask)
{
    const int K = ch.K(), Nt = ch.Nt(), a = st.connected();
    if (st.F.rows() != Nt + a || st.F.cols() != K)
        throw DimensionError("passive: F must be (Nt + a) x K");
    const cmat GW = ch.G * st.F.topRows(Nt);
    const rvec mask = apply_mask ? rvec(1.0 - st.a_vec.array()) : rvec::Ones(ch.N());
    PathTerms t;
    t.refl.resize(static_cast<std::size_t>(K));
    t.conn = cmat::Zero(K, K);
    for (int k = 0; k < K; ++k)
    {
        const cvec &h = ch.h_r[static_cast<std::size_t>(k)];
        const cvec w = (mask.array() * h.conjugate().array()).matrix();
        t.refl[static_cast<std::size_t>(k)] = w.asDiagonal() * GW;
        for (int l = 0; l < a; ++l)
            t.conn.row(k) += std::conj(h[st.assign[static_cast<std::size_t>(l)]]) * st.F.row(Nt + l);
    }
    return t;
}
} // namespace detail

inline PassiveQuadratic build_passive_quadratic(const ChannelSet &ch, const SolverState &st, const rvec &alpha)
{
    check_state_dims(ch, st);
    const int K = ch.K(), N = ch.N();
    const auto t = detail::path_terms(ch, st, true);
    PassiveQuadratic q;
    q.C = cmat::Zero(N, N);
    q.beta = cvec::Zero(N);
    for (int k = 0; k < K; ++k)
    {
        const cmat &Gk = t.refl[static_cast<std::size_t>(k)];
        const double wl = alpha[k] * st.lambda[k];
        const double w = wl * std::norm(st.u[k]);
        q.C.noalias() += w * Gk * Gk.adjoint();
        q.beta.noalias() += w * Gk * t.conn.row(k).adjoint();
        q.beta -= wl * std::conj(st.u[k]) * Gk.col(k);
    }
    q.C = 0.5 * (q.C + q.C.adjoint()).eval();
    q.D = cmat::Zero(N + 1, N + 1);
    q.D.topLeftCorner(N, N) = -q.C;
    q.D.topRightCorner(N, 1) = -q.beta;
    q.D.bottomLeftCorner(1, N) = -q.beta.adjoint();
    q.eps = choose_eps(q.D);
    return q;
}

/// One phase update p <- exp(j arg((D + eps I) p)). Entries whose argument
/// is undefined keep their phase.
inline cvec power_iteration_step(const cvec &p, const cmat &D, double eps)
{
    const cvec y = D * p + eps * p;
    ++counters().matvecs;
    ++counters().inner_pi_steps;
    cvec next(p.size());
    for (Eigen::Index n = 0; n < p.size(); ++n)
    {
        const double m = std::abs(y[n]);
        next[n] = m > 0.0 ? y[n] / m : p[n];
    }
    return next;
}

inline double lifted_value(const cvec &p, const cmat &D, double eps)
{
    return std::real(p.dot(D * p)) + eps * p.squaredNorm();
}

/// phi = exp(j arg(p[0:N] / p[N])).
inline cvec extract_phi(const cvec &p)
{
    const Eigen::Index N = p.size() - 1;
    const cplx ref = p[N];
    cvec phi(N);
    for (Eigen::Index n = 0; n < N; ++n)
        phi[n] = std::polar(1.0, std::arg(p[n] / ref));
    return phi;
}

enum class PassiveMode
{
    iterate_to_tol,
    single_step
};

struct PassiveResult
{
    cvec phi;
    int steps = 0;
    double eps = 0.0;
    std::vector<double> values;  // p^H (D + eps I) p, starting point first
    int monotone_violations = 0; // steps that decreased the lifted value beyond 1e-10 (relative)
    double upper_bound = 0.0;    // sum |D'_mn|
    bool bound_respected = true;
};

/// Phase update from the current phi. In iterate_to_tol mode steps repeat
/// until the relative gain of the lifted value drops below `tol` or
/// `max_steps` is hit; single_step performs exactly one step.
inline PassiveResult passive_update(const ChannelSet &ch, const SolverState &st, const rvec &alpha, PassiveMode mode,
                                    int max_steps, double tol, std::optional<double> eps_override = std::nullopt,
                                    double eps_scale = 1.0)
{
    const PassiveQuadratic q = build_passive_quadratic(ch, st, alpha);
    const int N = ch.N();
    PassiveResult r;
    r.eps = eps_override.value_or(q.eps * eps_scale);
    r.upper_bound = (q.D + r.eps * cmat::Identity(N + 1, N + 1)).cwiseAbs().sum();

    cvec p(N + 1);
    p.head(N) = st.phi;
    p[N] = 1.0;
    double v = lifted_value(p, q.D, r.eps);
    r.values.push_back(v);
    const int limit = mode == PassiveMode::single_step ? 1 : max_steps;
    for (int s = 0; s < limit; ++s)
    {
        p = power_iteration_step(p, q.D, r.eps);
        ++r.steps;
        const double next = lifted_value(p, q.D, r.eps);
        r.values.push_back(next);
        if (next < v - 1e-10 * std::max(1.0, std::abs(v)))
            ++r.monotone_violations;
        if (next > r.upper_bound * (1.0 + 1e-12))
            r.bound_respected = false;
        const double gain = (next - v) / std::max(std::abs(v), 1e-300);
        v = next;
        if (mode == PassiveMode::iterate_to_tol && gain < tol)
            break;
    }
    r.phi = extract_phi(p);
    return r;
}

} // namespace rdars

#endif
