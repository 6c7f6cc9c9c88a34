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

#ifndef RDARS_TRAIN_HPP
#define RDARS_TRAIN_HPP

#include "rdars/parallel.hpp"
#include "rdars/solver.hpp"

#include <functional>
#include <numeric>

namespace rdars
{

/// One training or test realisation. `id` selects the initialisation stream
/// of the forward pass, so equal ids give equal results.
struct Sample
{
    ChannelSet ch;
    std::uint64_t id = 0;
};

inline std::vector<Sample> make_dataset(const SystemConfig &cfg, std::size_t count, std::uint64_t seed)
{
    if (count < 1)
        throw Error("make_dataset: count must be at least 1");
    std::vector<Sample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back({generate_channels(cfg, seed, i), i});
    return out;
}

/// Mean negative WSR of the unrolled forward pass over the batch.
inline double loss(const TrainableParams &params, const std::vector<Sample> &batch, const SystemConfig &cfg,
                   int workers = worker_count())
{
    if (batch.empty())
        throw Error("loss: empty batch");
    SystemConfig c = cfg;
    const auto w = parallel_map<double>(
        batch.size(),
        [&](std::size_t i) {
            SolveOptions o;
            o.variant = Variant::pwm_bfnet;
            o.stream = batch[i].id;
            return pwm_bfnet_forward(c, batch[i].ch, params, o).second.final_wsr();
        },
        workers);
    double s = 0.0;
    for (double x : w)
        s += x;
    return -s / static_cast<double>(batch.size());
}

/// Two-point simultaneous-perturbation estimate of grad f at theta with a
/// Rademacher direction. `evals` (if given) is increased by the number of
/// calls to f.
inline std::vector<double> spsa_estimate(const std::vector<double> &theta, double c, std::mt19937_64 &rng,
                                         const std::function<double(const std::vector<double> &)> &f,
                                         int *evals = nullptr)
{
    if (!(c > 0.0))
        throw Error("spsa_estimate: perturbation scale must be positive");
    std::bernoulli_distribution coin(0.5);
    std::vector<double> delta(theta.size()), plus = theta, minus = theta;
    for (std::size_t i = 0; i < theta.size(); ++i)
    {
        delta[i] = coin(rng) ? 1.0 : -1.0;
        plus[i] += c * delta[i];
        minus[i] -= c * delta[i];
    }
    const double fp = f(plus);
    const double fm = f(minus);
    if (evals)
        *evals += 2;
    const double s = (fp - fm) / (2.0 * c);
    std::vector<double> g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
        g[i] = s * delta[i];
    return g;
}

/// Gradient estimator over all trainable scalars (flattened order of
/// TrainableParams). Swappable so that another estimator can be used.
using GradientEstimator = std::function<std::vector<double>(const TrainableParams &, const std::vector<Sample> &,
                                                            const SystemConfig &, std::mt19937_64 &)>;

inline std::vector<double> spsa_gradient(const TrainableParams &params, const std::vector<Sample> &batch,
                                         const SystemConfig &cfg, double c, std::mt19937_64 &rng,
                                         int *evals = nullptr)
{
    auto f = [&](const std::vector<double> &theta) {
        TrainableParams p = params;
        p.unflatten(theta);
        return loss(p, batch, cfg);
    };
    return spsa_estimate(params.flatten(), c, rng, f, evals);
}

struct TrainRun
{
    std::size_t dataset_size = 200;
    std::size_t batch_size = 5;
    int batches_per_epoch = 40;
    int epochs = 10;
    double lr = 0.05;
    double momentum = 0.7;
    double spsa_c = 0.1;
    double validation_fraction = 0.2;
    std::uint64_t seed = 3;
    int unroll_T = 5;

    // results
    std::vector<double> loss_curve;       // validation loss after each epoch
    std::vector<double> train_loss_curve; // mean batch loss per epoch
    double initial_validation_loss = 0.0;
    double best_validation_loss = 0.0;
    int best_epoch = 0; // 0 means the starting parameters
    bool halted = false;
    TrainableParams best;
};

/// SGD with momentum on gradient estimates; keeps the parameters with the
/// lowest validation loss (the starting point included). Halts when the
/// validation loss stays more than 50% above its best for 3 epochs.
inline TrainableParams train(const SystemConfig &cfg, TrainRun &run, GradientEstimator estimator = {},
                             std::optional<TrainableParams> start = std::nullopt)
{
    cfg.validate();
    if (run.batch_size < 1 || run.batches_per_epoch < 0 || run.epochs < 0 || run.dataset_size < 2)
        throw ConfigError("train", "invalid run sizes");
    if (!(run.validation_fraction > 0.0 && run.validation_fraction < 1.0))
        throw ConfigError("validation_fraction", "must lie in (0, 1)");
    if (!estimator)
        estimator = [c = run.spsa_c](const TrainableParams &p, const std::vector<Sample> &b, const SystemConfig &cf,
                                     std::mt19937_64 &rng) { return spsa_gradient(p, b, cf, c, rng); };

    const auto data = make_dataset(cfg, run.dataset_size, run.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    auto split_rng = make_rng(run.seed, 0, 0x5B17);
    std::shuffle(order.begin(), order.end(), split_rng);
    const std::size_t n_val =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(run.validation_fraction * data.size())), 1,
                                data.size() - 1);
    std::vector<Sample> val;
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        if (i < n_val)
            val.push_back(data[order[i]]);
        else
            train_idx.push_back(order[i]);
    }

    TrainableParams p = start ? *start : default_params(cfg, run.unroll_T);
    p.check(run.unroll_T, cfg.K);
    std::vector<double> theta = p.flatten(), buf(theta.size(), 0.0);
    run.initial_validation_loss = loss(p, val, cfg);
    run.best_validation_loss = run.initial_validation_loss;
    run.best = p;
    run.best_epoch = 0;
    run.loss_curve.clear();
    run.train_loss_curve.clear();
    run.halted = false;

    auto grad_rng = make_rng(run.seed, 1, 0x5B17);
    auto batch_rng = make_rng(run.seed, 2, 0x5B17);
    std::size_t cursor = train_idx.size();
    int bad_epochs = 0;
    for (int ep = 1; ep <= run.epochs; ++ep)
    {
        double train_sum = 0.0;
        for (int b = 0; b < run.batches_per_epoch; ++b)
        {
            std::vector<Sample> batch;
            while (batch.size() < run.batch_size)
            {
                if (cursor == train_idx.size())
                {
                    std::shuffle(train_idx.begin(), train_idx.end(), batch_rng);
                    cursor = 0;
                }
                batch.push_back(data[train_idx[cursor++]]);
            }
            p.unflatten(theta);
            const auto g = estimator(p, batch, cfg, grad_rng);
            for (std::size_t i = 0; i < theta.size(); ++i)
            {
                buf[i] = run.momentum * buf[i] + g[i];
                theta[i] -= run.lr * buf[i];
            }
            p.unflatten(theta);
            train_sum += loss(p, batch, cfg);
        }
        p.unflatten(theta);
        const double v = loss(p, val, cfg);
        run.loss_curve.push_back(v);
        run.train_loss_curve.push_back(run.batches_per_epoch > 0 ? train_sum / run.batches_per_epoch : v);
        if (v < run.best_validation_loss)
        {
            run.best_validation_loss = v;
            run.best = p;
            run.best_epoch = ep;
        }
        // losses are negative WSR: "worse by 50%" means 50% of |best| above it
        if (v > run.best_validation_loss + 0.5 * std::abs(run.best_validation_loss))
            ++bad_epochs;
        else
            bad_epochs = 0;
        if (bad_epochs >= 3)
        {
            run.halted = true;
            break;
        }
    }
    return run.best;
}

} // namespace rdars

#endif
