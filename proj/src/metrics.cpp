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

#include "fdxbl/metrics.hpp"

#include <cmath>

namespace fdxbl {

namespace {

void check_dim(const CVector &v, int expected, const char *what)
{
    if (v.size() != expected)
        throw ShapeMismatch(std::string(what) + ": expected length " + std::to_string(expected) +
                            ", got " + std::to_string(v.size()));
}

} // namespace

bool satisfies_power(const BeamPair &pair, double rel_tol)
{
    const double nt = static_cast<double>(pair.f.size());
    const double nr = static_cast<double>(pair.w.size());
    return std::abs(pair.f.squaredNorm() - nt) <= rel_tol * nt &&
           std::abs(pair.w.squaredNorm() - nr) <= rel_tol * nr;
}

double to_db(double linear) { return 10.0 * std::log10(std::max(linear, kLinearFloor)); }

double from_db(double db) { return std::pow(10.0, db / 10.0); }

double snr_tx(const ChannelRealization &ch, const CVector &f)
{
    check_dim(f, ch.n_tx(), "transmit beam");
    return ch.budget.gain_tx * std::norm(ch.h_tx.dot(f));
}

double snr_rx(const ChannelRealization &ch, const CVector &w)
{
    check_dim(w, ch.n_rx(), "receive beam");
    return ch.budget.gain_rx * std::norm(w.dot(ch.h_rx));
}

double inr_rx(const ChannelRealization &ch, const CVector &f, const CVector &w)
{
    check_dim(f, ch.n_tx(), "transmit beam");
    check_dim(w, ch.n_rx(), "receive beam");
    return ch.budget.gain_si * std::norm(w.dot(ch.si * f));
}

double inr_cross(const ChannelRealization &ch)
{
    if (std::isinf(ch.inr_cross_db) && ch.inr_cross_db < 0.0)
        return 0.0;
    return from_db(ch.inr_cross_db);
}

double sinr_tx(const ChannelRealization &ch, const CVector &f)
{
    return snr_tx(ch, f) / (1.0 + inr_cross(ch));
}

double sinr_rx(const ChannelRealization &ch, const CVector &f, const CVector &w)
{
    return snr_rx(ch, w) / (1.0 + inr_rx(ch, f, w));
}

Rates rates_from_sinr(double sinr_tx, double sinr_rx)
{
    Rates r;
    r.r_tx = std::log2(1.0 + sinr_tx);
    r.r_rx = std::log2(1.0 + sinr_rx);
    r.r_sum = r.r_tx + r.r_rx;
    return r;
}

Rates rates(const ChannelRealization &ch, const CVector &f, const CVector &w)
{
    return rates_from_sinr(sinr_tx(ch, f), sinr_rx(ch, f, w));
}

SlotNoise draw_slot_noise(Rng &rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    SlotNoise z;
    z.snr_tx = normal(rng);
    z.snr_rx = normal(rng);
    z.inr_rx = normal(rng);
    return z;
}

MeasurementVector measure_with(const ChannelRealization &ch, const BeamPair &pair,
                               const NoiseModel &noise, const SlotNoise &z, int slot_index)
{
    if (noise.sigma2 < 0.0)
        throw std::invalid_argument("noise variance must be nonnegative");
    const double sd = std::sqrt(noise.sigma2);
    MeasurementVector y;
    y.snr_tx_db = to_db(snr_tx(ch, pair.f)) + sd * z.snr_tx;
    y.snr_rx_db = to_db(snr_rx(ch, pair.w)) + sd * z.snr_rx;
    y.inr_rx_db = to_db(inr_rx(ch, pair.f, pair.w)) + sd * z.inr_rx;
    y.noisy = noise.sigma2 > 0.0;
    y.slot_index = slot_index;
    return y;
}

MeasurementVector measure(const ChannelRealization &ch, const BeamPair &pair,
                          const NoiseModel &noise, Rng &rng, int slot_index)
{
    return measure_with(ch, pair, noise, draw_slot_noise(rng), slot_index);
}

} // namespace fdxbl
