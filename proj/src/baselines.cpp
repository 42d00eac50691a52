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

#include "fdxbl/baselines.hpp"

#include <cmath>

namespace fdxbl {

namespace {

CVector matched(const CVector &h)
{
    const double norm = h.norm();
    if (!(norm > 0.0))
        throw DegenerateChannel("matched beam needs a nonzero channel");
    return h * (std::sqrt(static_cast<double>(h.size())) / norm);
}

CVector random_beam(int n, Rng &rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> raw(2 * n);
    for (int i = 0; i < n; ++i) {
        raw[i] = normal(rng);
        raw[n + i] = normal(rng);
    }
    return normalize_beam(raw);
}

} // namespace

BeamPair mrt_mrc(const ChannelRealization &ch) { return {matched(ch.h_tx), matched(ch.h_rx)}; }

Rates fd_capacity_rates(const ChannelRealization &ch)
{
    const BeamPair p = mrt_mrc(ch);
    return rates_from_sinr(sinr_tx(ch, p.f), snr_rx(ch, p.w));
}

double fd_capacity(const ChannelRealization &ch) { return fd_capacity_rates(ch).r_sum; }

double measurement_proxy(const MeasurementVector &y)
{
    const double st = from_db(y.snr_tx_db);
    const double sr = from_db(y.snr_rx_db);
    const double in = from_db(y.inr_rx_db);
    return std::log2(1.0 + st) + std::log2(1.0 + sr / (1.0 + in));
}

std::size_t best_proxy_slot(std::span<const ProbeSlot> slots)
{
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const double v = measurement_proxy(slots[i].y);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    return best;
}

ProbeTrace random_probe_policy(const ChannelRealization &ch, int horizon, const NoiseModel &noise,
                               Rng &rng)
{
    if (horizon < 1)
        throw std::invalid_argument("random probing needs at least one slot");
    ProbeTrace trace;
    trace.slots.reserve(horizon);
    for (int t = 1; t <= horizon; ++t) {
        BeamPair p;
        p.f = random_beam(ch.n_tx(), rng);
        p.w = random_beam(ch.n_rx(), rng);
        MeasurementVector y = measure(ch, p, noise, rng, t);
        trace.slots.push_back({std::move(p), y});
    }
    trace.serving = trace.slots[best_proxy_slot(trace.slots)].pair;
    trace.achieved = rates(ch, trace.serving);
    return trace;
}

} // namespace fdxbl
