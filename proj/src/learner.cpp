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

#include "fdxbl/learner.hpp"

#include <cmath>

namespace fdxbl {

CVector normalize_beam(std::span<const double> raw)
{
    if (raw.size() % 2 != 0 || raw.empty())
        throw ShapeMismatch("raw beam vector must have even, nonzero length");
    const Eigen::Index n = static_cast<Eigen::Index>(raw.size() / 2);
    double energy = 0.0;
    for (double x : raw)
        energy += x * x;
    if (!(energy > 0.0) || !std::isfinite(energy))
        throw DegenerateBeam("raw beam output is all zeros or non-finite; cannot normalize");
    const double scale = std::sqrt(static_cast<double>(n) / energy);
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out[i] = scale * cplx(raw[i], raw[n + i]);
    return out;
}

BeamPair beam_pair_from_raw(std::span<const double> raw, int n_tx, int n_rx)
{
    if (static_cast<int>(raw.size()) != beam_output_dim(n_tx, n_rx))
        throw ShapeMismatch("raw beam pair has length " + std::to_string(raw.size()) +
                            ", expected " + std::to_string(beam_output_dim(n_tx, n_rx)));
    return {normalize_beam(raw.first(2 * n_tx)), normalize_beam(raw.subspan(2 * n_tx))};
}

LearnerState init_state(const LearnerParams &params)
{
    const auto &l = params.layout();
    LearnerState st;
    st.s = RVector::Zero(l.hidden);
    st.c = RVector::Zero(l.hidden);
    const auto raw = params.init_raw();
    st.current_pair = beam_pair_from_raw({raw.data(), static_cast<std::size_t>(raw.size())},
                                         l.n_tx, l.n_rx);
    st.t = 1;
    return st;
}

LearnerState lstm_step(const LearnerParams &params, const LearnerState &state,
                       const MeasurementVector &y)
{
    if (std::isnan(y.snr_tx_db) || std::isnan(y.snr_rx_db) || std::isnan(y.inr_rx_db))
        throw std::invalid_argument("measurement contains NaN");
    if (y.slot_index != state.t)
        throw std::invalid_argument("measurement slot " + std::to_string(y.slot_index) +
                                    " does not match state slot " + std::to_string(state.t));
    const int h = params.layout().hidden;
    const double scale = params.config().measurement_scale;
    Eigen::Vector3d x(y.snr_tx_db / scale, y.snr_rx_db / scale, y.inr_rx_db / scale);

    RVector z = params.lstm_wx() * x + params.lstm_wh() * state.s + params.lstm_b();
    LearnerState next;
    next.s.resize(h);
    next.c.resize(h);
    for (int k = 0; k < h; ++k) {
        const double in = sigmoid(z[k]);
        const double forget = sigmoid(z[h + k]);
        const double cand = std::tanh(z[2 * h + k]);
        const double out = sigmoid(z[3 * h + k]);
        next.c[k] = forget * state.c[k] + in * cand;
        next.s[k] = out * std::tanh(next.c[k]);
    }
    next.current_pair = state.current_pair;
    next.t = state.t + 1;
    return next;
}

namespace {

BeamPair head(const LearnerParams &params, const std::vector<DenseLayerSlot> &layers,
              const RVector &input)
{
    const RMatrix raw = mlp_forward(params, layers, input);
    const auto &l = params.layout();
    return beam_pair_from_raw({raw.data(), static_cast<std::size_t>(raw.size())}, l.n_tx, l.n_rx);
}

} // namespace

BeamPair synthesize_probe(const LearnerParams &params, const RVector &hidden)
{
    return head(params, params.layout().probe, hidden);
}

BeamPair synthesize_serving(const LearnerParams &params, const RVector &cell)
{
    return head(params, params.layout().serve, cell);
}

ProbeTrace unroll_with(const LearnerParams &params, const ChannelRealization &ch,
                       const NoiseModel &noise, std::span<const SlotNoise> slot_noise)
{
    const int horizon = params.config().horizon;
    if (static_cast<int>(slot_noise.size()) != horizon)
        throw std::invalid_argument("need one noise triple per probing slot");
    if (ch.n_tx() != params.layout().n_tx || ch.n_rx() != params.layout().n_rx)
        throw ShapeMismatch("channel dimensions do not match the learner");

    ProbeTrace trace;
    trace.slots.reserve(horizon);
    LearnerState st = init_state(params);
    for (int t = 1; t <= horizon; ++t) {
        MeasurementVector y = measure_with(ch, st.current_pair, noise, slot_noise[t - 1], t);
        trace.slots.push_back({st.current_pair, y});
        st = lstm_step(params, st, y);
        if (t < horizon)
            st.current_pair = synthesize_probe(params, st.s);
    }
    trace.serving = synthesize_serving(params, st.c);
    trace.achieved = rates(ch, trace.serving);
    return trace;
}

ProbeTrace unroll(const LearnerParams &params, const ChannelRealization &ch,
                  const NoiseModel &noise, Rng &rng)
{
    std::vector<SlotNoise> z(params.config().horizon);
    for (auto &slot : z)
        slot = draw_slot_noise(rng);
    return unroll_with(params, ch, noise, z);
}

double loss(const LearnerParams &params, std::span<const ChannelRealization> batch,
            const NoiseModel &noise, Rng &rng)
{
    if (batch.empty())
        throw std::invalid_argument("loss needs a nonempty batch");
    double total = 0.0;
    for (const auto &ch : batch)
        total += unroll(params, ch, noise, rng).achieved.r_sum;
    return -total / static_cast<double>(batch.size());
}

} // namespace fdxbl
