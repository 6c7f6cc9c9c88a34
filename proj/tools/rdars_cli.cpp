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

// Command-line harness: solve | sweep | train | eval | selfcheck.

#include "rdars/rdars.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

namespace
{

using namespace rdars;

struct Output
{
    std::unique_ptr<std::ofstream> file;
    std::ostream *os = &std::cout;

    explicit Output(const std::string &path)
    {
        if (path.empty() || path == "-")
            return;
        file = std::make_unique<std::ofstream>(path);
        if (!*file)
            throw Error("cannot write " + path);
        os = file.get();
    }
};

SystemConfig read_config(const std::string &path) { return path.empty() ? SystemConfig{} : load_config(path); }

std::vector<double> parse_values(const std::string &text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        if (item.empty())
            continue;
        try
        {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        }
        catch (const std::exception &)
        {
            throw ConfigError("values", "not a number: '" + item + "'");
        }
    }
    if (out.empty())
        throw ConfigError("values", "empty list");
    return out;
}

std::vector<Variant> parse_variants(const std::string &text)
{
    std::vector<Variant> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(parse_variant(item));
    if (out.empty())
        throw ConfigError("variant", "empty list");
    return out;
}

std::string states_path(const std::string &out) { return (out.empty() || out == "-" ? "rdars" : out) + ".states.jsonl"; }

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Joint beamforming and mode switching for RDARS-aided downlinks"};
    app.require_subcommand(1);

    std::string config_path, variant = "pwm", out_path, axis, values, params_path;
    std::uint64_t seed = 1;
    int realizations = 20;
    bool dump_states = false;

    auto *solve_cmd = app.add_subcommand("solve", "run one realisation and write its iteration trace");
    auto *sweep_cmd = app.add_subcommand("sweep", "mean and standard error over realisations along one axis");
    auto *train_cmd = app.add_subcommand("train", "fit the unrolled solver's scalars");
    auto *eval_cmd = app.add_subcommand("eval", "compare trained scalars against the iterative solver");
    auto *check_cmd = app.add_subcommand("selfcheck", "run the invariant suite");

    for (auto *c : {solve_cmd, sweep_cmd, train_cmd, eval_cmd})
    {
        c->add_option("--config", config_path, "scenario JSON (desk defaults when omitted)");
        c->add_option("--seed", seed, "channel seed");
        c->add_option("--out", out_path, "output path (stdout when omitted)");
    }
    for (auto *c : {solve_cmd, sweep_cmd})
    {
        c->add_option("--variant", variant, "pwm, pwm_bfnet, fixed_index, ris or das (sweep: comma list)");
        c->add_flag("--dump-states", dump_states, "also write final states as JSON lines");
    }
    for (auto *c : {solve_cmd, sweep_cmd, eval_cmd})
        c->add_option("--params", params_path, "trained parameter file for pwm_bfnet");
    sweep_cmd->add_option("--axis", axis, "ptot_dbm, K, N, rician_xi, a or iterations")->required();
    sweep_cmd->add_option("--values", values, "comma-separated axis values")->required();
    for (auto *c : {sweep_cmd, eval_cmd})
        c->add_option("--realizations", realizations, "realisations per cell")->check(CLI::PositiveNumber);

    TrainRun run;
    train_cmd->add_option("--dataset", run.dataset_size, "dataset size");
    train_cmd->add_option("--batch", run.batch_size, "samples per batch");
    train_cmd->add_option("--batches", run.batches_per_epoch, "batches per epoch");
    train_cmd->add_option("--epochs", run.epochs, "epochs");
    train_cmd->add_option("--lr", run.lr, "learning rate");
    train_cmd->add_option("--spsa-c", run.spsa_c, "perturbation scale");
    train_cmd->add_option("--unroll", run.unroll_T, "unrolled iterations");
    int unroll_T = 5;
    solve_cmd->add_option("--unroll", unroll_T, "unrolled iterations for pwm_bfnet");
    sweep_cmd->add_option("--unroll", unroll_T, "unrolled iterations for pwm_bfnet");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (check_cmd->parsed())
        {
            bool all = true;
            for (const auto &c : run_selfcheck())
            {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.module << '/' << c.name << ": " << c.detail << '\n';
                all = all && c.passed;
            }
            return all ? 0 : 1;
        }

        SystemConfig cfg = read_config(config_path);
        cfg.seed = seed;
        cfg.validate();
        std::optional<TrainableParams> params;
        if (!params_path.empty())
            params = load_params(params_path);

        if (solve_cmd->parsed())
        {
            const Variant v = parse_variant(variant);
            SolveOptions o;
            o.unroll_T = params ? params->unroll_T : unroll_T;
            const IterationTrace t = run_realization(cfg, v, seed, 0, o, params);
            Output out(out_path);
            *out.os << trace_csv_header << '\n';
            write_trace_rows(*out.os, "solve", v, seed, t);
            if (dump_states)
            {
                std::ofstream s(states_path(out_path));
                nlohmann::json j{{"variant", variant_name(v)}, {"seed", seed}, {"realization", 0},
                                 {"wsr", t.final_wsr()}, {"state", state_to_json(t.final_state)}};
                s << j.dump() << '\n';
            }
            return 0;
        }
        if (sweep_cmd->parsed())
        {
            SweepSpec spec;
            spec.axis = parse_axis(axis);
            spec.values = parse_values(values);
            spec.variants = parse_variants(variant);
            spec.realizations = realizations;
            spec.seed = seed;
            spec.params = params;
            spec.keep_states = dump_states;
            SolveOptions base;
            base.unroll_T = params ? params->unroll_T : unroll_T;
            const auto cells = sweep(cfg, spec, base);
            Output out(out_path);
            *out.os << sweep_csv_header << '\n';
            write_sweep_rows(*out.os, spec, cells);
            if (dump_states)
            {
                std::ofstream s(states_path(out_path));
                for (const auto &c : cells)
                    for (std::size_t r = 0; r < c.traces.size(); ++r)
                    {
                        nlohmann::json j{{"axis", axis_name(spec.axis)}, {"value", c.value},
                                         {"variant", variant_name(c.variant)}, {"seed", seed},
                                         {"realization", r}, {"wsr", c.wsr[r]},
                                         {"state", state_to_json(c.traces[r].final_state)}};
                        s << j.dump() << '\n';
                    }
            }
            return 0;
        }
        if (train_cmd->parsed())
        {
            run.seed = seed;
            const TrainableParams best = train(cfg, run);
            std::cerr << "initial validation loss " << run.initial_validation_loss << '\n';
            for (std::size_t e = 0; e < run.loss_curve.size(); ++e)
                std::cerr << "epoch " << e + 1 << " train " << run.train_loss_curve[e] << " validation "
                          << run.loss_curve[e] << '\n';
            std::cerr << "best epoch " << run.best_epoch << (run.halted ? " (halted)" : "") << '\n';
            if (out_path.empty() || out_path == "-")
                std::cout << params_to_string(best);
            else
                save_params(best, out_path);
            return 0;
        }
        if (eval_cmd->parsed())
        {
            if (!params)
                throw ParamsError("--params", "eval needs a parameter file");
            params->check(params->unroll_T, cfg.K);
            const EvalResult r = evaluate(cfg, *params, realizations, seed);
            Output out(out_path);
            *out.os << trace_csv_header << '\n';
            for (std::size_t i = 0; i < r.bfnet.size(); ++i)
            {
                write_trace_rows(*out.os, "eval-" + std::to_string(i), Variant::pwm_bfnet, seed, r.bfnet[i]);
                write_trace_rows(*out.os, "eval-" + std::to_string(i), Variant::pwm, seed, r.pwm[i]);
            }
            // comparison row: wsr_bits holds mean unrolled WSR over mean iterative WSR at the same budget
            out.os->precision(17);
            *out.os << "eval-ratio,pwm_bfnet/pwm," << seed << ',' << params->unroll_T << ',' << r.ratio << ",,,,,\n";
            std::cerr << "mean WSR pwm_bfnet " << r.mean_bfnet << " pwm " << r.mean_pwm << " ratio " << r.ratio
                      << '\n';
            return 0;
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
    catch (const ParamsError &e)
    {
        std::cerr << "parameter file error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
