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

#ifndef FDXBL_BATCH_KERNEL_HPP
#define FDXBL_BATCH_KERNEL_HPP

#include "fdxbl/learner.hpp"

namespace fdxbl {

// Batched unroll of the learner: one column per realization, GEMMs for the
// dense layers and OpenMP over columns for the per-realization channel
// algebra. Produces the same numbers as the single-sample reference in
// learner.hpp (up to floating-point summation order) plus the exact
// gradient of -mean r_sum by backpropagation through time.

/// Standard normals for a batch, indexed [sample * T + slot].
using BatchNoise = std::vector<SlotNoise>;

/// Draws T triples per sample in batch order from one stream, matching the
/// consumption order of loss() in learner.hpp.
BatchNoise draw_batch_noise(int batch_size, int horizon, Rng &rng);

struct BatchOutput {
    double loss = 0.0; // -mean r_sum
    std::vector<Rates> achieved;
    std::vector<BeamPair> serving;
};

BatchOutput batch_forward(const LearnerParams &params, std::span<const ChannelRealization> batch,
                          const NoiseModel &noise, std::span<const SlotNoise> z);

/// Forward pass plus d(loss)/d(params) written into grad (resized to the
/// parameter count). Measurement noise is a constant input; clamped dB
/// readings contribute zero gradient.
BatchOutput batch_loss_and_gradient(const LearnerParams &params,
                                    std::span<const ChannelRealization> batch,
                                    const NoiseModel &noise, std::span<const SlotNoise> z,
                                    RVector &grad);

} // namespace fdxbl

#endif
