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

#ifndef FDXBL_TRAINER_HPP
#define FDXBL_TRAINER_HPP

#include "fdxbl/batch_kernel.hpp"

#include <functional>
#include <string>

namespace fdxbl {

/// Adam with the usual bias correction.
class AdamOptimizer {
public:
    explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                           double epsilon = 1e-8);

    void step(RVector &params, const RVector &grad);
    long steps() const { return t_; }
    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr) { lr_ = lr; }

private:
    double lr_, beta1_, beta2_, eps_;
    RVector m_, v_;
    long t_ = 0;
};

/// Draws one realization per call; training requests a fresh one for every
/// batch element.
using ChannelSampler = std::function<ChannelRealization(Rng &)>;

struct TrainOptions {
    NoiseModel noise{0.4};
    int validation_pairs = 256;
    int validate_every = 500; // 0 disables periodic validation
    /// Learning rate is multiplied by lr_decay every lr_decay_every steps
    /// (1.0 keeps it constant).
    double lr_decay = 1.0;
    int lr_decay_every = 0;
    std::function<void(int iteration, double train_loss, double validation_r_sum)> on_validate;
};

struct ValidationPoint {
    int iteration = 0;
    double mean_r_sum = 0.0;
};

struct TrainResult {
    LearnerParams params; // last good parameters
    std::vector<ValidationPoint> history;
    bool diverged = false;
    std::string message;
};

/// Mean noiseless r_sum of the learner on a fixed set, with the probing noise
/// of pair i taken from make_stream(noise_seed, {i}).
double validation_r_sum(const LearnerParams &params, std::span<const ChannelRealization> set,
                        const NoiseModel &noise, std::uint64_t noise_seed);

/// Minimizes -mean r_sum with Adam on mini-batches of fresh realizations.
///
/// Streams: initialization {seed, 0}; batch channels {seed, 1, it}; batch
/// noise {seed, 2, it}; held-out set {seed, 3, i}; held-out noise {seed, 4}.
/// A NaN/inf loss or a degenerate beam stops training and returns the last
/// good parameters with diverged set.
TrainResult train(const LearnerConfig &config, const ChannelSampler &sampler,
                  const TrainOptions &options);

} // namespace fdxbl

#endif
