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

#ifndef RDARS_MODE_SWITCH_HPP
#define RDARS_MODE_SWITCH_HPP

#include "rdars/counters.hpp"
#include "rdars/passive.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace rdars
{

struct EigResult
{
    double value = 0.0;
    bool converged = true;
    int iters = 0;
};

/// Largest eigenvalue of a Hermitian matrix by shifted power iteration.
///
/// The shift comes from the Gershgorin lower bound so the iteration locks
/// onto the top of the spectrum. The returned value is the Rayleigh quotient
/// plus the residual norm, which does not undershoot the eigenvalue the
/// iteration converged to. Without convergence the Frobenius norm (an upper
/// bound) is returned and `converged` is false.
inline EigResult max_eig_hermitian(const cmat &M, double tol = 1e-8, int max_iters = 500)
{
    if (M.rows() != M.cols())
        throw DimensionError("max_eig_hermitian: matrix must be square");
    const Eigen::Index n = M.rows();
    EigResult r;
    ++counters().eig_calls;
    if (n == 0)
        return r;
    const double fro = M.norm();
    if ((M - M.adjoint()).norm() > 1e-10 * std::max(1.0, fro))
        throw Error("max_eig_hermitian: matrix is not Hermitian");
    if (fro == 0.0)
        return r;

    double gersh = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i)
        gersh = std::min(gersh, M(i, i).real() - (M.row(i).cwiseAbs().sum() - std::abs(M(i, i))));
    const double shift = std::max(0.0, -gersh);

    auto rng = make_rng(0x9e3779b97f4a7c15ULL);
    cvec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = complex_normal(rng);
    v.normalize();
    for (int it = 1; it <= max_iters; ++it)
    {
        const cvec Mv = M * v;
        ++counters().matvecs;
        ++counters().power_method_iters;
        const double theta = std::real(v.dot(Mv));
        const double res = (Mv - theta * v).norm();
        r.iters = it;
        if (res <= tol * fro)
        {
            r.value = theta + res;
            return r;
        }
        cvec next = Mv + shift * v;
        const double nn = next.norm();
        if (nn == 0.0)
            break;
        v = next / nn;
    }
    r.value = fro;
    r.converged = false;
    return r;
}

/// Linearised selection problem around the expansion point a_t.
///
/// The a-dependent part of the penalised weighted MSE is
///   f3(a) = 2 Re{(r1 + r2 + r3)^H a} + a^T R1 a + (r4^T a + r5) / (2 rho)
/// for binary a, and the majoriser replaces a^T R1 a by its second-order
/// expansion with curvature Lambda1 >= lambda_max(R1).
struct SelectionSurrogate
{
    cvec r1, r2, r3;
    rvec r4;
    double r5 = 0.0;
    cmat R1;
    double Lambda1 = 0.0;
    bool lambda_converged = true;
    cvec r6;
    double rho = 1.0;
    rvec a_t;

    double f3(const rvec &a) const
    {
        const cvec ac = a.cast<cplx>();
        return 2.0 * (r1 + r2 + r3).real().dot(a) + std::real(ac.dot(R1 * ac)) + (r4.dot(a) + r5) / (2.0 * rho);
    }

    double f3_bar(const rvec &a) const
    {
        const cvec ac = a.cast<cplx>();
        const cvec at = a_t.cast<cplx>();
        const cvec Rat = R1 * at - Lambda1 * at;
        return 2.0 * (r1 + r2 + r3).real().dot(a) + Lambda1 * a.squaredNorm() + 2.0 * std::real(ac.dot(Rat)) -
               std::real(at.dot(Rat)) + (r4.dot(a) + r5) / (2.0 * rho);
    }
};

inline SelectionSurrogate build_selection_surrogate(const ChannelSet &ch, const SolverState &st, const rvec &alpha,
                                                    double rho)
{
    check_state_dims(ch, st);
    const int K = ch.K(), N = ch.N();
    const auto t = detail::path_terms(ch, st, false);
    SelectionSurrogate s;
    s.r1 = cvec::Zero(N);
    s.r2 = cvec::Zero(N);
    s.r3 = cvec::Zero(N);
    s.R1 = cmat::Zero(N, N);
    const cvec phic = st.phi.conjugate();
    for (int k = 0; k < K; ++k)
    {
        // z_km = Phi^H H_r,k w_b,m ; h_k f_m = x_km + t_km - a^T z_km
        const cmat Z = phic.asDiagonal() * t.refl[static_cast<std::size_t>(k)];
        const double wl = alpha[k] * st.lambda[k];
        const double w = wl * std::norm(st.u[k]);
        s.r1 += wl * st.u[k] * Z.col(k).conjugate();
        for (int m = 0; m < K; ++m)
        {
            const cplx x = Z.col(m).sum();
            s.r2 -= w * x * Z.col(m).conjugate();
            s.r3 -= w * t.conn(k, m) * Z.col(m).conjugate();
        }
        s.R1.noalias() += w * Z * Z.adjoint();
    }
    s.R1 = 0.5 * (s.R1 + s.R1.adjoint()).eval();
    const rvec ind = assignment_indicator(st.assign, N);
    s.r4 = rvec::Ones(N) - 2.0 * ind;
#ifdef RDARS_FAULT_FLIP_R4
    s.r4 = -s.r4; // deliberate defect for exercising the self-check
#endif
    s.r5 = static_cast<double>(st.connected());
    const auto eig = max_eig_hermitian(s.R1);
    s.Lambda1 = eig.value;
    s.lambda_converged = eig.converged;
    s.rho = rho;
    s.a_t = st.a_prev.size() == N ? st.a_prev : st.a_vec;
    const cvec at = s.a_t.cast<cplx>();
    s.r6 = 2.0 * (s.r1 + s.r2 + s.r3) + 2.0 * (s.R1 * at - s.Lambda1 * at) + (s.r4 / (2.0 * rho)).cast<cplx>();
    return s;
}

/// Binary vector with ones at the `a` smallest entries of Re{r6}; ties go to
/// the smaller index.
inline rvec select_a(const cvec &r6, int a)
{
    const int N = static_cast<int>(r6.size());
    if (a < 0 || a > N)
        throw DimensionError("select_a: a must lie in [0, N]");
    std::vector<int> idx(static_cast<std::size_t>(N));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return r6[i].real() < r6[j].real(); });
    rvec out = rvec::Zero(N);
    for (int l = 0; l < a; ++l)
        out[idx[static_cast<std::size_t>(l)]] = 1.0;
    return out;
}

/// Linearised assignment problem around the expansion point atilde_t.
///
/// atilde stacks the a one-hot columns of the assignment matrix (segment l
/// occupies entries l*N .. l*N+N-1). For valid (one-hot, distinct) atilde
///   f4(atilde) = 2 Re{(rt1 + rt2)^H atilde} + atilde^T R2 atilde + const
/// where R2 carries the penalty coupling -(1/rho)(I_a (x) A).
struct AssignmentSurrogate
{
    int N = 0;
    int a = 0;
    cvec rt1, rt2;
    cmat R2;
    double Lambda2 = 0.0;
    bool lambda_converged = true;
    cvec rt3;
    rvec c;
    double rho = 1.0;
    double penalty_const = 0.0; // (sum(a_vec) + a) / (2 rho)
    std::vector<int> atilde_t;

    rvec stacked(const std::vector<int> &assign) const
    {
        rvec v = rvec::Zero(static_cast<Eigen::Index>(N) * a);
        for (int l = 0; l < a; ++l)
            v[l * N + assign[static_cast<std::size_t>(l)]] = 1.0;
        return v;
    }

    double f4(const std::vector<int> &assign) const
    {
        const rvec v = stacked(assign);
        const cvec vc = v.cast<cplx>();
        return 2.0 * (rt1 + rt2).real().dot(v) + std::real(vc.dot(R2 * vc)) + penalty_const;
    }

    double f4_bar(const std::vector<int> &assign) const
    {
        const rvec v = stacked(assign);
        const cvec vc = v.cast<cplx>();
        const cvec at = stacked(atilde_t).cast<cplx>();
        const cvec Rat = R2 * at - Lambda2 * at;
        return 2.0 * (rt1 + rt2).real().dot(v) + Lambda2 * v.squaredNorm() + 2.0 * std::real(vc.dot(Rat)) -
               std::real(at.dot(Rat)) + penalty_const;
    }

    double linear_value(const std::vector<int> &assign) const { return c.dot(stacked(assign)); }
};

inline constexpr long max_assignment_dim = 4096;

inline AssignmentSurrogate build_assignment_surrogate(const ChannelSet &ch, const SolverState &st,
                                                      const rvec &alpha, double rho)
{
    check_state_dims(ch, st);
    const int K = ch.K(), N = ch.N(), Nt = ch.Nt(), a = st.connected();
    if (static_cast<long>(N) * a > max_assignment_dim)
        throw DimensionError("build_assignment_surrogate: N * a exceeds " + std::to_string(max_assignment_dim));
    const auto t = detail::path_terms(ch, st, true);
    const cmat Wr = st.F.bottomRows(a);
    const Eigen::Index na = static_cast<Eigen::Index>(N) * a;

    AssignmentSurrogate s;
    s.N = N;
    s.a = a;
    s.rho = rho;
    s.rt1 = cvec::Zero(na);
    s.rt2 = cvec::Zero(na);
    // conj(b_km) = conj(w_r,m) (x) h_k
    auto conj_b = [&](int k, int m) {
        const cvec &h = ch.h_r[static_cast<std::size_t>(k)];
        cvec out(na);
        for (int l = 0; l < a; ++l)
            out.segment(static_cast<Eigen::Index>(l) * N, N) = std::conj(Wr(l, m)) * h;
        return out;
    };
    cmat S = cmat::Zero(N, N);
    for (int k = 0; k < K; ++k)
    {
        const double wl = alpha[k] * st.lambda[k];
        const double w = wl * std::norm(st.u[k]);
        const cvec &h = ch.h_r[static_cast<std::size_t>(k)];
        for (int m = 0; m < K; ++m)
        {
            const cplx y = st.phi.dot(t.refl[static_cast<std::size_t>(k)].col(m));
            s.rt1 += w * y * conj_b(k, m);
        }
        s.rt2 -= wl * st.u[k] * conj_b(k, k);
        S.noalias() += w * h * h.adjoint();
    }
    const cmat Q = Wr.conjugate() * Wr.transpose();
    cmat P(na, na);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j)
            P.block(static_cast<Eigen::Index>(i) * N, static_cast<Eigen::Index>(j) * N, N, N) = Q(i, j) * S;
    P = 0.5 * (P + P.adjoint()).eval();

    // The penalty block is negative semidefinite, so lambda_max(P) bounds lambda_max(R2).
    const auto eig = max_eig_hermitian(P);
    s.Lambda2 = eig.value;
    s.lambda_converged = eig.converged;
    s.R2 = std::move(P);
    for (int l = 0; l < a; ++l)
        for (int i = 0; i < N; ++i)
            s.R2(static_cast<Eigen::Index>(l) * N + i, static_cast<Eigen::Index>(l) * N + i) -= st.a_vec[i] / rho;
    s.penalty_const = (st.a_vec.sum() + a) / (2.0 * rho);

    s.atilde_t = st.atilde_prev.size() == static_cast<std::size_t>(a) ? st.atilde_prev : st.assign;
    const cvec at = s.stacked(s.atilde_t).cast<cplx>();
    s.rt3 = 2.0 * (s.rt1 + s.rt2) + 2.0 * (s.R2 * at - s.Lambda2 * at);
    s.c = s.rt3.real();
    (void)Nt;
    return s;
}

/// Per-segment argmin of c with conflict resolution.
///
/// When several segments claim the same element, the element goes to the
/// claimant that yields the smallest total cost once the other claimants
/// move to their best element not held by anyone else; the others then
/// move. Repeats until all segments hold distinct elements. Ties favour the
/// smaller segment number, then the smaller element index.
inline std::vector<int> select_assignment(const rvec &c, int N, int a)
{
    if (a < 0 || a > N)
        throw DimensionError("select_assignment: need 0 <= a <= N");
    if (c.size() != static_cast<Eigen::Index>(N) * a)
        throw DimensionError("select_assignment: c must have N * a entries");
    auto cost = [&](int l, int i) { return c[static_cast<Eigen::Index>(l) * N + i]; };
    auto best_excluding = [&](int l, const std::vector<char> &blocked) {
        int best = -1;
        for (int i = 0; i < N; ++i)
            if (!blocked[static_cast<std::size_t>(i)] && (best < 0 || cost(l, i) < cost(l, best)))
                best = i;
        return best;
    };

    std::vector<int> cand(static_cast<std::size_t>(a));
    const std::vector<char> none(static_cast<std::size_t>(N), 0);
    for (int l = 0; l < a; ++l)
        cand[static_cast<std::size_t>(l)] = best_excluding(l, none);

    std::vector<char> locked(static_cast<std::size_t>(N), 0);
    for (int round = 0; round <= a; ++round)
    {
        std::vector<int> count(static_cast<std::size_t>(N), 0);
        for (int i : cand)
            ++count[static_cast<std::size_t>(i)];
        int idx = -1;
        for (int i = 0; i < N && idx < 0; ++i)
            if (count[static_cast<std::size_t>(i)] > 1)
                idx = i;
        if (idx < 0)
            return cand;

        std::vector<int> claimants;
        for (int l = 0; l < a; ++l)
            if (cand[static_cast<std::size_t>(l)] == idx)
                claimants.push_back(l);
        // elements unavailable to a displaced claimant
        std::vector<char> blocked = locked;
        blocked[static_cast<std::size_t>(idx)] = 1;
        for (int l = 0; l < a; ++l)
            if (cand[static_cast<std::size_t>(l)] != idx)
                blocked[static_cast<std::size_t>(cand[static_cast<std::size_t>(l)])] = 1;

        int winner = claimants.front();
        double winner_cost = std::numeric_limits<double>::infinity();
        for (int w : claimants)
        {
            double total = cost(w, idx);
            for (int l : claimants)
                if (l != w)
                    total += cost(l, best_excluding(l, blocked));
            if (total < winner_cost)
            {
                winner_cost = total;
                winner = w;
            }
        }
        locked[static_cast<std::size_t>(idx)] = 1;
        for (int l : claimants)
        {
            if (l == winner)
                continue;
            const int next = best_excluding(l, blocked);
            cand[static_cast<std::size_t>(l)] = next;
            blocked[static_cast<std::size_t>(next)] = 1;
        }
    }
    throw Error("select_assignment: conflict resolution did not terminate");
}

inline double update_rho(double rho, double eta) { return eta * rho; }

/// ||A - Atilde Atilde^H||_F from the compact encodings.
inline double penalty_residual(const rvec &a_vec, const std::vector<int> &assign)
{
    rvec diff = a_vec;
    for (int i : assign)
        diff[i] -= 1.0;
    return diff.norm();
}

} // namespace rdars

#endif
