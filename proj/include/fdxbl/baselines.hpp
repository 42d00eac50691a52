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

#ifndef FDXBL_BASELINES_HPP
#define FDXBL_BASELINES_HPP

#include "fdxbl/learner.hpp"

namespace fdxbl {

/// Matched beams, f = sqrt(Nt) h_tx / ||h_tx||, w = sqrt(Nr) h_rx / ||h_rx||.
/// Throws DegenerateChannel on a zero user channel.
BeamPair mrt_mrc(const ChannelRealization &ch);

/// Rates of MRT+MRC with the self-interference removed. Upper-bounds the sum
/// rate of any feasible pair on the same realization.
Rates fd_capacity_rates(const ChannelRealization &ch);
double fd_capacity(const ChannelRealization &ch);

/// Noisy-measurement proxy log2(1 + snr_tx) + log2(1 + snr_rx / (1 + inr_rx))
/// evaluated from one slot's dB readings.
double measurement_proxy(const MeasurementVector &y);

/// Non-adaptive control: T i.i.d. complex Gaussian probing pairs (normalized),
/// serving pair = probed pair with the largest measurement proxy (first one on
/// ties). Draw order per slot: f entries (re, im), w entries, then the slot's
/// three noise normals.
ProbeTrace random_probe_policy(const ChannelRealization &ch, int horizon, const NoiseModel &noise,
                               Rng &rng);

/// Index of the slot with the largest proxy.
std::size_t best_proxy_slot(std::span<const ProbeSlot> slots);

} // namespace fdxbl

#endif
