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

#include "rdars/active.hpp"
#include "rdars/channel.hpp"
#include "rdars/config.hpp"
#include "rdars/model.hpp"

#include <gtest/gtest.h>

using namespace rdars;

namespace
{

cmat random_cmat(int r, int c, std::mt19937_64 &rng)
{
    cmat m(r, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < r; ++i)
            m(i, j) = complex_normal(rng);
    return m;
}

cvec random_cvec(int n, std::mt19937_64 &rng) { return random_cmat(n, 1, rng).col(0); }

cvec random_phases(int n, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
    cvec p(n);
    for (int i = 0; i < n; ++i)
        p[i] = std::polar(1.0, u(rng));
    return p;
}

SystemConfig small_config(int N, int a, int K = 2, int Nt = 3)
{
    SystemConfig c;
    c.K = K;
    c.Nt = Nt;
    c.set_elements(N);
    c.a = a;
    return c;
}

} // namespace

TEST(Steering, SingleElementIsOne)
{
    const cvec b = steering_vector(1, 0.37);
    ASSERT_EQ(b.size(), 1);
    EXPECT_NEAR(std::abs(b[0] - cplx(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Steering, ZeroPhaseTwoElements)
{
    const cvec b = steering_vector(2, 0.0);
    EXPECT_NEAR(std::abs(b[0] - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(b[1] - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
}

TEST(Steering, AlternatingSigns)
{
    const cvec b = steering_vector(4, 1.0);
    const double expect[] = {0.5, -0.5, 0.5, -0.5};
    for (int m = 0; m < 4; ++m)
        EXPECT_NEAR(std::abs(b[m] - expect[m]), 0.0, 1e-15);
    EXPECT_NEAR(b.norm(), 1.0, 1e-15);
}

TEST(Steering, RejectsZeroElements) { EXPECT_THROW(steering_vector(0, 0.1), DimensionError); }

TEST(Planar, Cases)
{
    EXPECT_NEAR(std::abs(planar_steering(1, 1, 0.3, -0.2)[0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR((planar_steering(1, 5, 0.3, -0.2) - steering_vector(5, -0.2)).norm(), 0.0, 1e-15);
    const cvec b = planar_steering(2, 2, 0.0, 0.0);
    for (int i = 0; i < 4; ++i)
        EXPECT_NEAR(std::abs(b[i] - 0.5), 0.0, 1e-15);
    EXPECT_THROW(planar_steering(0, 2, 0.0, 0.0), DimensionError);
}

TEST(PathGain, ReferenceValues)
{
    EXPECT_NEAR(path_gain(1.0, 2.2, 60.4) / 9.120108393559096e-7, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(path_gain(1.0, 3.7, 0.0), 1.0);
    EXPECT_NEAR(path_gain(10.0, 2.0, 0.0), 0.01, 1e-15);
    EXPECT_THROW(path_gain(0.0, 2.0, 0.0), Error);
    EXPECT_THROW(path_gain(-1.0, 2.0, 0.0), Error);
}

TEST(Channels, LosLimitIsRankOne)
{
    SystemConfig cfg;
    cfg.rician_xi = 1e9;
    const ChannelSet ch = generate_channels(cfg, 5, 0);
    const cmat G = ch.G / ch.kappa_b;
    Eigen::JacobiSVD<cmat> svd(G);
    const auto s = svd.singularValues();
    double rest = 0.0;
    for (Eigen::Index i = 1; i < s.size(); ++i)
        rest += s[i] * s[i];
    EXPECT_LT(std::sqrt(rest), 1e-3);
}

TEST(Channels, SecondMomentsPerEntry)
{
    // unit-variance NLoS and unit-modulus LoS entries: E|G_ij|^2 = |kappa_b|^2
    SystemConfig cfg;
    double g = 0.0, h = 0.0;
    const int draws = 500;
    for (int i = 0; i < draws; ++i)
    {
        const ChannelSet ch = generate_channels(cfg, 17, static_cast<std::uint64_t>(i));
        g += ch.G.squaredNorm() / (std::norm(ch.kappa_b) * cfg.N * cfg.Nt);
        h += ch.h_r[0].squaredNorm() / (std::norm(ch.kappa_r[0]) * cfg.N);
    }
    EXPECT_NEAR(g / draws, 1.0, 0.1);
    EXPECT_NEAR(h / draws, 1.0, 0.1);
}

TEST(Channels, Deterministic)
{
    SystemConfig cfg;
    const ChannelSet a = generate_channels(cfg, 9, 3), b = generate_channels(cfg, 9, 3);
    EXPECT_TRUE(a.G == b.G);
    for (int k = 0; k < cfg.K; ++k)
        EXPECT_TRUE(a.h_r[static_cast<std::size_t>(k)] == b.h_r[static_cast<std::size_t>(k)]);
    EXPECT_TRUE(a.finite());
    EXPECT_EQ(a.G.rows(), cfg.N);
    EXPECT_EQ(a.G.cols(), cfg.Nt);
    const ChannelSet c = generate_channels(cfg, 9, 4);
    EXPECT_FALSE(a.G == c.G);
}

TEST(Channels, UsersInsideDisc)
{
    SystemConfig cfg;
    for (std::uint64_t i = 0; i < 50; ++i)
        for (const auto &p : generate_channels(cfg, 2, i).ue_pos)
        {
            EXPECT_LE(std::hypot(p[0] - cfg.ue_center[0], p[1] - cfg.ue_center[1]), cfg.ue_radius + 1e-12);
            EXPECT_DOUBLE_EQ(p[2], cfg.ue_center[2]);
        }
}

TEST(EffectiveChannel, HandComputedTwoElements)
{
    // N = 2, Nt = 1, K = 1, element 1 connected
    ChannelSet ch;
    ch.G = cmat(2, 1);
    ch.G << cplx(1, 1), cplx(2, -1);
    ch.h_r = {cvec(2)};
    ch.h_r[0] << cplx(0.5, 0.0), cplx(0.0, 2.0);
    SolverState st;
    st.phi = cvec::Ones(2);
    st.a_vec = rvec(2);
    st.a_vec << 0, 1;
    st.assign = {1};
    st.F = cmat::Ones(2, 1);
    const EffectiveChannel e = effective_channel(ch, st);
    ASSERT_EQ(e.H.rows(), 1);
    ASSERT_EQ(e.H.cols(), 2);
    // reflected: conj(phi_0) * conj(h_0) * G_0 = 0.5 (1 + j); connected: conj(h_1) = -2j
    EXPECT_NEAR(std::abs(e.H(0, 0) - cplx(0.5, 0.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(e.H(0, 1) - cplx(0.0, -2.0)), 0.0, 1e-15);
    // swapping the connected element feeds the other entry
    st.a_vec << 1, 0;
    st.assign = {0};
    const EffectiveChannel f = effective_channel(ch, st);
    EXPECT_NEAR(std::abs(f.H(0, 0) - cplx(0.0, -2.0) * cplx(2, -1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(f.H(0, 1) - cplx(0.5, 0.0)), 0.0, 1e-15);
}

TEST(EffectiveChannel, NoConnectedElementsIsReflectionOnly)
{
    auto rng = make_rng(1);
    const SystemConfig cfg = small_config(6, 2);
    const ChannelSet ch = generate_channels(cfg, 1, 0);
    SolverState st;
    st.phi = random_phases(6, rng);
    st.a_vec = rvec::Zero(6);
    st.F = random_cmat(cfg.Nt, cfg.K, rng);
    const EffectiveChannel e = effective_channel(ch, st);
    ASSERT_EQ(e.dim(), cfg.Nt);
    for (int k = 0; k < cfg.K; ++k)
    {
        const cmat Hr = ch.h_r[static_cast<std::size_t>(k)].conjugate().asDiagonal() * ch.G;
        EXPECT_NEAR((e.H.row(k) - st.phi.adjoint() * Hr).norm(), 0.0, 1e-12 * Hr.norm());
    }
}

TEST(EffectiveChannel, MatchesReceivedSignalModel)
{
    // y_k = h^H Phi^H (I - A) G W_b s + h^H Atilde W_r s, compared against h_k F s
    auto rng = make_rng(2);
    const SystemConfig cfg = small_config(8, 3);
    const ChannelSet ch = generate_channels(cfg, 3, 0);
    SolverState st;
    st.phi = random_phases(8, rng);
    st.assign = {5, 0, 3};
    st.a_vec = assignment_indicator(st.assign, 8);
    st.F = random_cmat(cfg.Nt + 3, cfg.K, rng);
    const EffectiveChannel e = effective_channel(ch, st);
    for (int trial = 0; trial < 5; ++trial)
    {
        const cvec s = random_cvec(cfg.K, rng);
        const cmat Phi = st.phi.asDiagonal();
        const rmat A = st.a_vec.asDiagonal();
        cmat At = cmat::Zero(8, 3);
        for (int l = 0; l < 3; ++l)
            At(st.assign[static_cast<std::size_t>(l)], l) = 1.0;
        for (int k = 0; k < cfg.K; ++k)
        {
            const cvec &h = ch.h_r[static_cast<std::size_t>(k)];
            const cplx y = (h.adjoint() * Phi.adjoint() * (rmat::Identity(8, 8) - A).cast<cplx>() * ch.G *
                            st.F.topRows(cfg.Nt) * s)(0, 0) +
                           (h.adjoint() * At * st.F.bottomRows(3) * s)(0, 0);
            const cplx y2 = (e.H.row(k) * st.F * s)(0, 0);
            EXPECT_NEAR(std::abs(y - y2), 0.0, 1e-10 * std::max(1.0, std::abs(y)));
        }
    }
}

TEST(EffectiveChannel, RejectsBadDimensions)
{
    const SystemConfig cfg = small_config(6, 2);
    const ChannelSet ch = generate_channels(cfg, 1, 0);
    SolverState st;
    st.phi = cvec::Ones(5);
    st.assign = {0, 1};
    st.a_vec = assignment_indicator(st.assign, 6);
    st.F = cmat::Ones(cfg.Nt + 2, cfg.K);
    EXPECT_THROW(effective_channel(ch, st), DimensionError);
}

TEST(Rates, ScalarCases)
{
    EffectiveChannel h;
    h.H = cmat::Ones(1, 1);
    const RateResult r = sinr_and_rate(h, cmat::Ones(1, 1), 1.0);
    EXPECT_NEAR(r.sinr[0], 1.0, 1e-15);
    EXPECT_NEAR(r.rate[0], 1.0, 1e-15);

    // h_1 f_2 = 0: no interference at user 1
    h.H = cmat(2, 2);
    h.H << cplx(1, 0), cplx(0, 0), cplx(0.3, 0.1), cplx(2, 0);
    cmat F(2, 2);
    F << cplx(2, 1), cplx(0, 0), cplx(0.5, 0), cplx(1, -1);
    const RateResult q = sinr_and_rate(h, F, 0.5);
    EXPECT_NEAR(q.sinr[0], std::norm(cplx(2, 1)) / 0.5, 1e-12);
}

TEST(Rates, MatchesExplicitLoops)
{
    auto rng = make_rng(4);
    EffectiveChannel h;
    h.H = random_cmat(3, 5, rng);
    const cmat F = random_cmat(5, 3, rng);
    const double s2 = 0.7;
    const RateResult r = sinr_and_rate(h, F, s2);
    for (int k = 0; k < 3; ++k)
    {
        double sig = 0.0, intf = 0.0;
        for (int m = 0; m < 3; ++m)
        {
            cplx acc = 0.0;
            for (int i = 0; i < 5; ++i)
                acc += h.H(k, i) * F(i, m);
            (m == k ? sig : intf) += std::norm(acc);
        }
        EXPECT_NEAR(r.sinr[k], sig / (intf + s2), 1e-12 * r.sinr[k]);
        EXPECT_NEAR(r.rate[k], std::log2(1.0 + sig / (intf + s2)), 1e-12);
    }
    const RateResult rot = sinr_and_rate(h, F * std::polar(1.0, 0.77), s2);
    EXPECT_NEAR((rot.sinr - r.sinr).norm(), 0.0, 1e-12 * r.sinr.norm());
}

TEST(Rates, WeightedSum)
{
    EXPECT_DOUBLE_EQ(wsr(rvec::Ones(2), (rvec(2) << 1, 2).finished()), 3.0);
    EXPECT_DOUBLE_EQ(wsr((rvec(2) << 0, 1).finished(), (rvec(2) << 99, 2).finished()), 2.0);
    EXPECT_DOUBLE_EQ(wsr((rvec(2) << 0.5, 0.5).finished(), (rvec(2) << 2, 4).finished()), 3.0);
}

TEST(Mse, ZeroReceiverGivesOne)
{
    auto rng = make_rng(5);
    const cmat H = random_cmat(2, 4, rng), F = random_cmat(4, 2, rng);
    EXPECT_NEAR(mse_e_k(H.row(0), F, 0, 0.0, 0.3, 2.0), 1.0, 1e-15);
}

TEST(Mse, OptimalReceiverGivesMmse)
{
    auto rng = make_rng(6);
    EffectiveChannel h;
    h.H = random_cmat(3, 4, rng);
    const cmat F = random_cmat(4, 3, rng);
    const double s2 = 0.4, P = 2.5;
    const cvec u = update_u(h, F, s2, P);
    const rvec mm = mmse(h, F, s2, P);
    for (int k = 0; k < 3; ++k)
    {
        const cplx hf = (h.H.row(k) * F.col(k))(0, 0);
        const double J = (h.H.row(k) * F).squaredNorm() + s2 / P * F.squaredNorm();
        EXPECT_NEAR(mse_e_k(h.H.row(k), F, k, u[k], s2, P), 1.0 - std::norm(hf) / J, 1e-10);
        EXPECT_NEAR(mm[k], 1.0 - std::norm(hf) / J, 1e-10);
        std::uniform_real_distribution<double> d(-2.0, 2.0);
        for (int t = 0; t < 100; ++t)
        {
            const cplx alt = u[k] + cplx(d(rng), d(rng)) * std::abs(u[k]);
            EXPECT_LE(mse_e_k(h.H.row(k), F, k, u[k], s2, P), mse_e_k(h.H.row(k), F, k, alt, s2, P) + 1e-14);
        }
    }
}

TEST(Mse, MatchesErrorExpansion)
{
    // E|u* y_k - s_k|^2 with unit-power independent symbols and noise variance sigma2/P ||F||^2
    auto rng = make_rng(7);
    const cmat H = random_cmat(3, 5, rng), F = random_cmat(5, 3, rng);
    const double s2 = 0.2, P = 1.7;
    for (int k = 0; k < 3; ++k)
    {
        const cplx u = complex_normal(rng);
        double e = std::norm(u) * s2 / P * F.squaredNorm();
        for (int m = 0; m < 3; ++m)
        {
            cplx g = 0.0;
            for (int i = 0; i < 5; ++i)
                g += H(k, i) * F(i, m);
            e += std::norm(std::conj(u) * g - (m == k ? 1.0 : 0.0));
        }
        EXPECT_NEAR(mse_e_k(H.row(k), F, k, u, s2, P), e, 1e-12 * std::max(1.0, e));
    }
}

TEST(Config, DefaultsAreValid)
{
    SystemConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.Nz * c.Ny, c.N);
    EXPECT_NEAR(c.ptot(), 0.1, 1e-15);
    EXPECT_NEAR(c.sigma2(), 1e-11, 1e-25);
    EXPECT_EQ(c.weights().size(), c.K);
}

TEST(Config, ValidationNamesField)
{
    auto expect_field = [](SystemConfig c, const std::string &field) {
        try
        {
            c.validate();
            ADD_FAILURE() << "no error for " << field;
        }
        catch (const ConfigError &e)
        {
            EXPECT_EQ(e.field(), field);
        }
    };
    SystemConfig c;
    c.a = c.N;
    expect_field(c, "a");
    c = {};
    c.Nz = 3;
    expect_field(c, "Nz");
    c = {};
    c.eta = 0.0;
    expect_field(c, "eta");
    c = {};
    c.alpha = {0.0, 0.0};
    expect_field(c, "alpha");
    c = {};
    c.alpha = {1.0};
    expect_field(c, "alpha");
    c = {};
    c.K = 0;
    expect_field(c, "K");
    c = {};
    c.rician_xi = -1.0;
    expect_field(c, "rician_xi");
}

TEST(Config, JsonRoundTripAndErrors)
{
    SystemConfig c;
    c.K = 3;
    c.alpha = {1.0, 0.5, 2.0};
    c.set_elements(24);
    c.Ptot_dbm = 27.5;
    const SystemConfig d = parse_config(dump_config(c));
    EXPECT_EQ(d.K, 3);
    EXPECT_EQ(d.N, 24);
    EXPECT_EQ(d.Nz * d.Ny, 24);
    EXPECT_EQ(d.alpha, c.alpha);
    EXPECT_DOUBLE_EQ(d.Ptot_dbm, 27.5);
    EXPECT_THROW(parse_config("{\"K\": 2, \"bogus\": 1}"), ConfigError);
    try
    {
        parse_config("{\n  \"K\": 2,\n  \"N\": ,\n}");
        ADD_FAILURE();
    }
    catch (const ConfigError &e)
    {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    try
    {
        parse_config("{\"a\": 40}");
        ADD_FAILURE();
    }
    catch (const ConfigError &e)
    {
        EXPECT_EQ(e.field(), "a");
    }
}

TEST(Config, SetElementsFactorisation)
{
    SystemConfig c;
    c.set_elements(32);
    EXPECT_EQ(c.Nz, 4);
    EXPECT_EQ(c.Ny, 8);
    c.set_elements(64);
    EXPECT_EQ(c.Nz, 8);
    c.set_elements(128);
    EXPECT_EQ(c.Nz, 8);
    EXPECT_EQ(c.Ny, 16);
    c.set_elements(16);
    EXPECT_EQ(c.Nz, 4);
}
