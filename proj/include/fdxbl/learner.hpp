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

#ifndef FDXBL_LEARNER_HPP
#define FDXBL_LEARNER_HPP

#include "fdxbl/metrics.hpp"
#include "fdxbl/network.hpp"

#include <span>
#include <vector>

namespace fdxbl {

// Single-sample reference implementation of the probe-then-serve policy.
// The batched kernel in batch_kernel.hpp computes the same quantities for
// many realizations at once and is checked against these functions.

/// Recurrent state entering slot t: hidden s_t, cell c_t and the probing pair
/// to use in that slot.
struct LearnerState {
    RVector s;
    RVector c;
    BeamPair current_pair;
    int t = 1;
};

struct ProbeSlot {
    BeamPair pair;
    MeasurementVector y;
};

struct ProbeTrace {
    std::vector<ProbeSlot> slots; // length T, slot_index 1..T
    BeamPair serving;
    Rates achieved; // noiseless
};

/// Maps 2N reals (real block, then imaginary block) to a complex beam with
/// squared norm N. Throws DegenerateBeam on an all-zero or non-finite input.
CVector normalize_beam(std::span<const double> raw);

/// Splits 2(Nt + Nr) raw outputs into (f, w): the first 2 Nt reals form f.
BeamPair beam_pair_from_raw(std::span<const double> raw, int n_tx, int n_rx);

LearnerState init_state(const LearnerParams &params);

/// One LSTM cell update with the measurement scaled by 1/measurement_scale.
/// Throws std::invalid_argument on a NaN measurement or slot mismatch.
LearnerState lstm_step(const LearnerParams &params, const LearnerState &state,
                       const MeasurementVector &y);

BeamPair synthesize_probe(const LearnerParams &params, const RVector &hidden);
BeamPair synthesize_serving(const LearnerParams &params, const RVector &cell);

/// Runs T probing slots on ch and synthesizes the serving pair from the final
/// cell state. Consumes exactly 3T normals from rng.
ProbeTrace unroll(const LearnerParams &params, const ChannelRealization &ch,
                  const NoiseModel &noise, Rng &rng);

/// Same as unroll with pre-drawn standard normals, one SlotNoise per slot.
ProbeTrace unroll_with(const LearnerParams &params, const ChannelRealization &ch,
                       const NoiseModel &noise, std::span<const SlotNoise> slot_noise);

/// -mean r_sum over the batch computed with unroll, sample by sample. Noise is
/// drawn from rng in batch order (sample 0 slots 1..T, then sample 1, ...).
double loss(const LearnerParams &params, std::span<const ChannelRealization> batch,
            const NoiseModel &noise, Rng &rng);

} // namespace fdxbl

#endif
