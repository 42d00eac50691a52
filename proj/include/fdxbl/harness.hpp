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

#ifndef FDXBL_HARNESS_HPP
#define FDXBL_HARNESS_HPP

#include "fdxbl/config.hpp"
#include "fdxbl/results.hpp"
#include "fdxbl/trainer.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>

namespace fdxbl {

/// No trained model on disk for a requested (T, kappa, seed).
class MissingCheckpoint : public std::runtime_error {
public:
    MissingCheckpoint(int horizon, double kappa_db, std::uint64_t seed,
                      const std::filesystem::path &path);
    int horizon() const { return horizon_; }
    double kappa_db() const { return kappa_db_; }

private:
    int horizon_;
    double kappa_db_;
};

enum class MethodKind { mrt_mrc, capacity, learner, random_probe };

struct MethodSpec {
    MethodKind kind = MethodKind::mrt_mrc;
    int horizon = 0;                        // learner and random_probe only
    std::uint64_t seed = 0;                 // reported in the seed column
    const LearnerParams *params = nullptr;  // learner only, not owned

    /// mrt_mrc, capacity, learner_T<T>, random_T<T>.
    std::string tag() const;
};

enum class Execution { serial, parallel };

/// Evaluation realizations for one kappa. Pair i takes its users from
/// make_stream(seed, {10, i}) and its random SI part from
/// make_stream(seed, {11, bits(kappa), i}), so azimuths agree across kappa.
std::vector<ChannelRealization> make_eval_set(const ScenarioSampler &sampler, double kappa_db,
                                              int n_pairs, std::uint64_t seed);

/// One row per pair. Probing noise for pair i comes from its own stream
/// (noise_seed, {20, kind, T, i}), so the serial and parallel paths agree
/// bit for bit.
std::vector<ResultRow> evaluate_method(const MethodSpec &method,
                                       std::span<const ChannelRealization> set,
                                       const NoiseModel &noise, std::uint64_t noise_seed,
                                       Execution exec = Execution::parallel);

/// Supplies trained parameters for (T, kappa, seed); throws MissingCheckpoint.
using ModelProvider = std::function<LearnerParams(int horizon, double kappa_db, std::uint64_t seed)>;

std::filesystem::path checkpoint_path(const std::filesystem::path &dir, int horizon,
                                      double kappa_db, std::uint64_t seed);

/// Reads checkpoints laid out by checkpoint_path(), checking shapes against
/// the config.
ModelProvider checkpoint_provider(const ExperimentConfig &config);

/// Output and checkpoint directories after applying the defaults
/// (config value, then FDXBL_OUT, then ./fdxbl_out).
std::filesystem::path resolve_output_dir(const ExperimentConfig &config);
std::filesystem::path resolve_checkpoint_dir(const ExperimentConfig &config);

/// Called once per evaluated method with the realizations it was given.
using EvalObserver =
    std::function<void(const MethodSpec &method, std::span<const ChannelRealization> set)>;

struct CdfCurve {
    std::string method;
    std::string metric; // inr_rx_db or sinr_rx_db
    EmpiricalCdf cdf;
};

struct CdfResult {
    std::vector<ResultRow> rows; // sorted
    std::vector<CdfCurve> curves;
};

/// All methods on the same n_eval_pairs realizations at cdf_kappa_db. Learner
/// models use the first training seed. Every checkpoint is resolved before
/// any evaluation starts.
CdfResult run_cdf_experiment(const ExperimentConfig &config, const ModelProvider &models,
                             Execution exec = Execution::parallel,
                             const EvalObserver &observer = {});

struct SweepPoint {
    std::string method;
    double kappa_db = 0.0;
    int horizon = 0;
    int n_seeds = 0;
    SampleSummary r_sum;
};

struct SweepResult {
    std::vector<ResultRow> rows; // sorted
    std::vector<SweepPoint> points;
};

/// Mean r_sum per (method, kappa); learner points pool every training seed.
SweepResult run_kappa_sweep(const ExperimentConfig &config, const ModelProvider &models,
                            Execution exec = Execution::parallel,
                            const EvalObserver &observer = {});

/// Writes rows, curves and a gnuplot script into dir; returns the paths.
std::vector<std::filesystem::path> write_cdf_outputs(const CdfResult &result,
                                                     const std::filesystem::path &dir);
std::vector<std::filesystem::path> write_sweep_outputs(const SweepResult &result,
                                                       const std::filesystem::path &dir);

/// Trains the learner for one (T, kappa, seed) on fresh realizations at that
/// kappa, using the config's hyperparameters.
TrainResult train_model(const ExperimentConfig &config, int horizon, double kappa_db,
                        std::uint64_t seed,
                        std::function<void(int, double, double)> on_validate = {});

/// Reproducible realization set as JSON (users, SI matrix and gains).
void save_dataset(const std::vector<ChannelRealization> &set, std::uint64_t seed,
                  const std::filesystem::path &path);
std::vector<ChannelRealization> load_dataset(const std::filesystem::path &path);

} // namespace fdxbl

#endif
