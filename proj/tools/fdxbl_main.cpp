// Copyright 2026 The fdxbl Authors
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
//
// Command-line front end: train, eval-cdf, sweep-kappa, gen-dataset.

#include "fdxbl/checkpoint.hpp"
#include "fdxbl/harness.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace fdxbl;
namespace fs = std::filesystem;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string checkpoint;
};

void add_common(CLI::App *cmd, CommonFlags &f, const char *seed_help, const char *ckpt_help)
{
    cmd->add_option("--config", f.config, "experiment config file (key = value)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, seed_help);
    cmd->add_option("--out", f.out, "output directory (default: config, then $FDXBL_OUT)");
    cmd->add_option("--checkpoint", f.checkpoint, ckpt_help);
}

ExperimentConfig load(const CommonFlags &f)
{
    ExperimentConfig c = load_config(f.config);
    if (!f.out.empty())
        c.output_dir = f.out;
    if (!f.checkpoint.empty())
        c.checkpoint_dir = f.checkpoint;
    return c;
}

void note(const std::string &msg) { std::cerr << "[fdxbl] " << msg << std::endl; }

int cmd_train(const CommonFlags &f, const std::vector<int> &only_t,
              const std::vector<double> &only_kappa, bool skip_existing)
{
    ExperimentConfig c = load(f);
    if (f.seed)
        c.train_seeds = {*f.seed};
    std::vector<int> horizons = only_t.empty() ? c.horizons : only_t;
    std::vector<double> kappas = only_kappa;
    if (kappas.empty()) {
        kappas = c.kappa_db;
        if (std::find(kappas.begin(), kappas.end(), c.cdf_kappa_db) == kappas.end())
            kappas.push_back(c.cdf_kappa_db);
    }
    const fs::path dir = resolve_checkpoint_dir(c);
    fs::create_directories(dir);
    int failures = 0;
    for (double kappa : kappas)
        for (int t : horizons)
            for (std::uint64_t seed : c.train_seeds) {
                const fs::path path = checkpoint_path(dir, t, kappa, seed);
                if (skip_existing && fs::exists(path)) {
                    note("exists, skipping " + path.string());
                    continue;
                }
                char label[96];
                std::snprintf(label, sizeof label, "T=%d kappa=%g seed=%llu", t, kappa,
                              static_cast<unsigned long long>(seed));
                note(std::string("training ") + label);
                const auto start = std::chrono::steady_clock::now();
                std::ofstream hist(fs::path(path).replace_extension(".history.csv"));
                hist << "iteration,train_loss,validation_r_sum\n";
                TrainResult r = train_model(c, t, kappa, seed, [&](int it, double l, double v) {
                    const double secs = std::chrono::duration<double>(
                                            std::chrono::steady_clock::now() - start)
                                            .count();
                    hist << it << ',' << l << ',' << v << std::endl;
                    char buf[128];
                    std::snprintf(buf, sizeof buf, "  %s it %d loss %.4f val r_sum %.4f (%.0fs)",
                                  label, it, l, v, secs);
                    note(buf);
                });
                if (r.diverged) {
                    note(std::string("training diverged for ") + label + ": " + r.message);
                    ++failures;
                }
                save_params(r.params, path);
                note("wrote " + path.string());
            }
    return failures == 0 ? 0 : 1;
}

int cmd_eval_cdf(const CommonFlags &f)
{
    ExperimentConfig c = load(f);
    if (f.seed)
        c.seed = *f.seed;
    const CdfResult r = run_cdf_experiment(c, checkpoint_provider(c));
    for (const auto &p : write_cdf_outputs(r, resolve_output_dir(c)))
        note("wrote " + p.string());
    for (const auto &curve : r.curves) {
        if (curve.metric != "inr_rx_db")
            continue;
        std::printf("%-14s  P[INR_rx <= 0 dB] = %.3f  P[INR_rx > 5 dB] = %.3f\n",
                    curve.method.c_str(), curve.cdf(0.0), curve.cdf.fraction_above(5.0));
    }
    return 0;
}

int cmd_sweep(const CommonFlags &f)
{
    ExperimentConfig c = load(f);
    if (f.seed)
        c.seed = *f.seed;
    const SweepResult r = run_kappa_sweep(c, checkpoint_provider(c));
    for (const auto &p : write_sweep_outputs(r, resolve_output_dir(c)))
        note("wrote " + p.string());
    for (const auto &p : r.points)
        std::printf("%-14s kappa %6.1f dB  mean r_sum %.4f +- %.4f\n", p.method.c_str(),
                    p.kappa_db, p.r_sum.mean, p.r_sum.sem);
    return 0;
}

int cmd_gen_dataset(const CommonFlags &f, std::optional<double> kappa, std::optional<int> pairs)
{
    ExperimentConfig c = load(f);
    if (f.seed)
        c.seed = *f.seed;
    const ScenarioSampler sampler(c.array, c.targets, c.inr_normalization);
    const auto set =
        make_eval_set(sampler, kappa.value_or(c.cdf_kappa_db), pairs.value_or(c.n_eval_pairs), c.seed);
    const fs::path path = resolve_output_dir(c) / "dataset.json";
    save_dataset(set, c.seed, path);
    note("wrote " + path.string());
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"fdxbl: full-duplex active beam learning toolkit"};
    app.require_subcommand(1);

    CommonFlags train_f, cdf_f, sweep_f, data_f;
    std::vector<int> only_t;
    std::vector<double> only_kappa;
    bool skip_existing = false;
    auto *train = app.add_subcommand("train", "train learner models and write checkpoints");
    add_common(train, train_f, "training seed (replaces train_seeds)", "checkpoint directory");
    train->add_option("--horizon", only_t, "only these horizons");
    train->add_option("--kappa", only_kappa, "only these kappa values (dB)");
    train->add_flag("--skip-existing", skip_existing, "keep checkpoints already on disk");

    auto *cdf = app.add_subcommand("eval-cdf", "INR/SINR CDFs at one kappa");
    add_common(cdf, cdf_f, "evaluation seed", "checkpoint directory");

    auto *sweep = app.add_subcommand("sweep-kappa", "mean sum rate against kappa");
    add_common(sweep, sweep_f, "evaluation seed", "checkpoint directory");

    std::optional<double> data_kappa;
    std::optional<int> data_pairs;
    auto *data = app.add_subcommand("gen-dataset", "write a reproducible realization set (JSON)");
    add_common(data, data_f, "dataset seed", "unused");
    data->add_option("--kappa", data_kappa, "kappa in dB (default: cdf_kappa_db)");
    data->add_option("--pairs", data_pairs, "number of realizations (default: n_eval_pairs)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() != 0)
            std::cerr << app.help() << '\n';
        return app.exit(e);
    }

    try {
        if (*train)
            return cmd_train(train_f, only_t, only_kappa, skip_existing);
        if (*cdf)
            return cmd_eval_cdf(cdf_f);
        if (*sweep)
            return cmd_sweep(sweep_f);
        if (*data)
            return cmd_gen_dataset(data_f, data_kappa, data_pairs);
    } catch (const std::exception &e) {
        std::cerr << "fdxbl: error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
