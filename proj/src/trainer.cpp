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

#include "fdxbl/trainer.hpp"

#include <cmath>

namespace fdxbl {

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon)
{
}

void AdamOptimizer::step(RVector &params, const RVector &grad)
{
    if (m_.size() != params.size()) {
        m_ = RVector::Zero(params.size());
        v_ = RVector::Zero(params.size());
    }
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
    if (lr_ == 0.0)
        return;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const double step = lr_ * std::sqrt(c2) / c1;
    params.array() -= step * m_.array() / (v_.array().sqrt() + eps_ * std::sqrt(c2));
}

double validation_r_sum(const LearnerParams &params, std::span<const ChannelRealization> set,
                        const NoiseModel &noise, std::uint64_t noise_seed)
{
    const int horizon = params.config().horizon;
    BatchNoise z;
    z.reserve(set.size() * horizon);
    for (std::size_t i = 0; i < set.size(); ++i) {
        Rng rng = make_stream(noise_seed, {i});
        for (int t = 0; t < horizon; ++t)
            z.push_back(draw_slot_noise(rng));
    }
    return -batch_forward(params, set, noise, z).loss;
}

TrainResult train(const LearnerConfig &config, const ChannelSampler &sampler,
                  const TrainOptions &options)
{
    config.validate();
    Rng init_rng = make_stream(config.seed, {0});
    TrainResult result;
    result.params = LearnerParams::initialize(config, init_rng);

    std::vector<ChannelRealization> held_out;
    held_out.reserve(options.validation_pairs);
    for (int i = 0; i < options.validation_pairs; ++i) {
        Rng rng = make_stream(config.seed, {3, static_cast<std::uint64_t>(i)});
        held_out.push_back(sampler(rng));
    }
    const std::uint64_t held_out_noise = derive_seed(config.seed, {4});

    auto validate = [&](int it, double train_loss) {
        if (held_out.empty())
            return;
        const double r = validation_r_sum(result.params, held_out, options.noise, held_out_noise);
        result.history.push_back({it, r});
        if (options.on_validate)
            options.on_validate(it, train_loss, r);
    };

    AdamOptimizer adam(config.learning_rate);
    LearnerParams candidate = result.params;
    std::vector<ChannelRealization> batch(config.batch_size);
    RVector grad;
    double last_loss = std::nan("");
    if (options.validate_every > 0)
        validate(0, last_loss);

    for (int it = 1; it <= config.train_iterations; ++it) {
        Rng channel_rng = make_stream(config.seed, {1, static_cast<std::uint64_t>(it)});
        for (auto &ch : batch)
            ch = sampler(channel_rng);
        Rng noise_rng = make_stream(config.seed, {2, static_cast<std::uint64_t>(it)});
        const BatchNoise z = draw_batch_noise(config.batch_size, config.horizon, noise_rng);

        double loss_value = 0.0;
        try {
            loss_value = batch_loss_and_gradient(candidate, batch, options.noise, z, grad).loss;
        } catch (const DegenerateBeam &e) {
            result.diverged = true;
            result.message = "iteration " + std::to_string(it) + ": " + e.what();
            return result;
        }
        if (!std::isfinite(loss_value) || !grad.allFinite()) {
            result.diverged = true;
            result.message = "iteration " + std::to_string(it) + ": non-finite loss or gradient";
            return result;
        }
        result.params = candidate;
        last_loss = loss_value;

        if (options.lr_decay_every > 0 && it % options.lr_decay_every == 0)
            adam.set_learning_rate(adam.learning_rate() * options.lr_decay);
        adam.step(candidate.values(), grad);

        if (options.validate_every > 0 && it % options.validate_every == 0) {
            result.params = candidate;
            validate(it, last_loss);
        }
    }
    if (candidate.values().allFinite())
        result.params = std::move(candidate);
    if (options.validate_every > 0 && (result.history.empty() ||
                                       result.history.back().iteration != config.train_iterations))
        validate(config.train_iterations, last_loss);
    return result;
}

} // namespace fdxbl
